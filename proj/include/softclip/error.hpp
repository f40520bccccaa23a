#pragma once

#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace softclip {

namespace detail {
inline std::string shortest(double x) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
}
}  // namespace detail

/// Malformed arguments or inconsistent shapes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values or other arithmetic breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value iteration ran out of iterations.
class NonConvergence : public NumericalError {
 public:
  NonConvergence(std::size_t iterations, double residual)
      : NumericalError("no convergence after " + std::to_string(iterations) +
                       " iterations (residual " + detail::shortest(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

/// A lower bound exceeds its upper bound at some (state, action).
class CrossedBounds : public std::runtime_error {
 public:
  CrossedBounds(std::size_t state, std::size_t action, double lower, double upper)
      : std::runtime_error("crossed bounds at (" + std::to_string(state) + ", " +
                           std::to_string(action) + "): lower " + detail::shortest(lower) +
                           " > upper " + detail::shortest(upper)),
        state_(state),
        action_(action) {}

  std::size_t state() const noexcept { return state_; }
  std::size_t action() const noexcept { return action_; }

 private:
  std::size_t state_;
  std::size_t action_;
};

/// Parse errors in the text formats (mdp files, maze grids, CSV, config files).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace softclip
