#pragma once

// Sample budgets and batch estimators for bounds computed from samples
// rather than exact sums: Lipschitz constant of Delta, closed-form sample
// counts, the sampled soft value V-hat and padded batch bounds.

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "softclip/bounds.hpp"
#include "softclip/mdp.hpp"
#include "softclip/rng.hpp"

namespace softclip {

struct LipschitzSpec {
  double L_r = 0.0;
  double L_p = 0.0;
  double L_Q = 0.0;
  double L_kappa = 0.0;  // Lipschitz constant of log prior; 0 for a uniform prior
  double beta = 1.0;
  double gamma = 0.0;

  void validate() const;
};

/// L_r + L_Q + gamma L_p (L_Q + L_kappa / beta).
double lipschitz_delta(const LipschitzSpec& spec);

// Closed forms (real-valued). Each budget_* below is the ceiling of the
// matching closed form; all throw InvalidArgument("unbounded budget") for
// eps <= 0 and InvalidArgument for delta outside (0, 1).

/// (L diam / eps)^dim log(1/delta).
double extrema_closed_form(double L, double diam, unsigned dim, double eps, double delta);
/// 1/2 ((r_max - r_min) / (eps (1 - gamma)))^2 log(2/delta).
double next_state_closed_form(double r_min, double r_max, double gamma, double eps, double delta);
/// 1/2 ((e^{beta H dR} - 1) / (e^{beta eps} - 1))^2 log(2/delta), H = 1/(1-gamma).
/// Requires eps < H dR.
double actions_closed_form(double r_min, double r_max, double gamma, double beta, double eps,
                           double delta);
/// Small-beta limit of the above: 1/2 (H dR / eps)^2 log(2/delta).
double hoeffding_closed_form(double r_min, double r_max, double gamma, double eps, double delta);

/// Smallest integer >= x, treating values within a relative 1e-12 of an
/// integer as that integer (so rounding noise in the closed forms does not
/// add a sample). Throws NumericalError("budget overflow") above 2^53.
std::uint64_t ceil_budget(double x);

std::uint64_t budget_extrema(double L, double diam, unsigned dim, double eps, double delta);
std::uint64_t budget_next_state(double r_min, double r_max, double gamma, double eps, double delta);
std::uint64_t budget_actions(double r_min, double r_max, double gamma, double beta, double eps,
                             double delta);

/// Sample counts for the three error sources: batch extrema of Delta-hat
/// (eps1, delta1), next-state expectation (eps2, delta2) and sampled soft
/// value (eps3, delta3). The padded bounds hold with probability at least
/// 1 - delta1 - 2 delta2 - 2 delta3.
struct SampleBudget {
  std::uint64_t batch_size = 0;  // |B|
  std::uint64_t n_states = 0;    // next-state samples per (s, a)
  std::uint64_t n_actions = 0;   // prior action samples per soft value
  std::array<double, 3> epsilons{};
  std::array<double, 3> deltas{};
  double diam = 0.0;
  unsigned dim = 0;
  RewardRange r_range{};

  double pad() const noexcept { return epsilons[0] + epsilons[1] + epsilons[2]; }
  double confidence() const noexcept { return 1.0 - deltas[0] - 2.0 * deltas[1] - 2.0 * deltas[2]; }
};

SampleBudget make_sample_budget(const LipschitzSpec& spec, double diam, unsigned dim,
                                RewardRange r_range, std::array<double, 3> epsilons,
                                std::array<double, 3> deltas);

/// beta^{-1} log( (1/n) sum_i e^{beta q_i} ), max-shifted. Throws on an empty sample.
double v_hat(std::span<const double> q_samples, double beta);

/// Soft value of every state estimated from `n` actions drawn from the prior
/// row; n == 0 gives the exact soft value.
std::vector<double> sampled_state_values(const QTable& q, const SoftConfig& cfg, std::size_t n,
                                         Rng& rng);

/// (1/n) sum_i (1 - d(s'_i)) values[s'_i] over n next states drawn from the
/// transition row of (s, a).
double sampled_next_value(const TabularMdp& mdp, std::span<const double> values, std::size_t s,
                          std::size_t a, std::size_t n, Rng& rng);

struct EmpiricalBoundsOptions {
  /// (s, a) pairs over which Delta-hat is extremized; empty means every
  /// non-terminal pair.
  std::vector<std::pair<std::size_t, std::size_t>> batch;
  std::size_t n_next = 0;           // next-state samples per (s, a); 0 = exact expectation
  std::size_t n_prior_actions = 0;  // action samples per soft value; 0 = exact
  double pad = 0.0;                 // eps1 + eps2 + eps3
};

/// Bounds with batch extrema and sampled expectations:
///   U = r + gamma (mean_i V-hat(s'_i) + (max_B Delta-hat + pad) / (1 - gamma))
///   L = r + gamma (mean_i V-hat(s'_i) + (min_B Delta-hat - pad) / (1 - gamma))
/// with terminal masking as in theorem1_bounds. One set of next-state draws
/// per (s, a) serves both the explicit term and Delta-hat. With n_next = 0,
/// n_prior_actions = 0, pad = 0 and the full batch this equals
/// theorem1_bounds. Provenance is BatchEstimated.
BoundPair empirical_bounds(const TabularMdp& mdp, const QTable& q, const SoftConfig& cfg,
                           const EmpiricalBoundsOptions& opts, Rng& rng);

/// Draws a batch of budget.batch_size (s, a) pairs uniformly over non-terminal
/// pairs and uses the budget's sample counts and padding.
BoundPair empirical_bounds(const TabularMdp& mdp, const QTable& q, const SoftConfig& cfg,
                           const SampleBudget& budget, Rng& rng);

}  // namespace softclip
