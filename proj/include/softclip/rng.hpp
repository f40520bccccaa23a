#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace softclip {

/// Mixes a seed with a stream name and up to two indices into a new seed.
/// Used to split one user seed into independent named substreams
/// ("maze", "init", "env", "eval", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t i = 0,
                          std::uint64_t j = 0) noexcept;

/// Random stream with platform-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; the distributions are implemented here because the standard
/// library's distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t i = 0, std::uint64_t j = 0)
      : engine_(derive_seed(seed, stream, i, j)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn from nonnegative weights (not necessarily normalized).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace softclip
