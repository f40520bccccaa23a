#include <iostream>

#include "softclip/cli.hpp"

int main(int argc, char** argv) { return softclip::run_cli(argc, argv, std::cout, std::cerr); }
