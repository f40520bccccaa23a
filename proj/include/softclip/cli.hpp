#pragma once

// Command-line front end: solve, train, sweep, pac-budget, check-bounds.
//
// Exit codes: 0 ok, 1 property violation found, 2 usage or input error,
// 3 numerical failure (including non-convergence).

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace softclip {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Reads `key = value` lines; blank lines and lines starting with '#' are
/// skipped. Keys may carry a leading "--". Throws InvalidArgument.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Splices `--config FILE` entries into `args` (argv without the program
/// name) right after the subcommand. Keys also given on the command line
/// are dropped, so flags override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

/// Runs the CLI with output and diagnostics on the given streams. The
/// resolved configuration of every command is logged to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace softclip
