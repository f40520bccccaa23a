#include "softclip/pac.hpp"

#include <algorithm>
#include <cmath>

#include "softclip/error.hpp"
#include "softclip/kernels.hpp"

namespace softclip {

namespace {

void check_eps_delta(double eps, double delta) {
  if (!(eps > 0.0)) throw InvalidArgument("unbounded budget");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must be in (0, 1)");
}

double reward_span(double r_min, double r_max) {
  if (!(r_max >= r_min) || !std::isfinite(r_min) || !std::isfinite(r_max)) {
    throw InvalidArgument("reward range must satisfy r_min <= r_max");
  }
  return r_max - r_min;
}

double horizon(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must be in [0, 1)");
  return 1.0 / (1.0 - gamma);
}

}  // namespace

void LipschitzSpec::validate() const {
  if (!(L_r >= 0.0 && L_p >= 0.0 && L_Q >= 0.0 && L_kappa >= 0.0)) {
    throw InvalidArgument("Lipschitz constants must be nonnegative");
  }
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must be in [0, 1)");
}

double lipschitz_delta(const LipschitzSpec& spec) {
  spec.validate();
  return spec.L_r + spec.L_Q + spec.gamma * spec.L_p * (spec.L_Q + spec.L_kappa / spec.beta);
}

double extrema_closed_form(double L, double diam, unsigned dim, double eps, double delta) {
  check_eps_delta(eps, delta);
  if (!(L >= 0.0)) throw InvalidArgument("Lipschitz constant must be nonnegative");
  if (!(diam > 0.0)) throw InvalidArgument("diameter must be positive");
  if (dim == 0) throw InvalidArgument("dimension must be positive");
  return std::pow(L * diam / eps, static_cast<double>(dim)) * std::log(1.0 / delta);
}

double next_state_closed_form(double r_min, double r_max, double gamma, double eps, double delta) {
  check_eps_delta(eps, delta);
  const double ratio = reward_span(r_min, r_max) * horizon(gamma) / eps;
  return 0.5 * ratio * ratio * std::log(2.0 / delta);
}

double actions_closed_form(double r_min, double r_max, double gamma, double beta, double eps,
                           double delta) {
  check_eps_delta(eps, delta);
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  const double spread = horizon(gamma) * reward_span(r_min, r_max);
  if (eps >= spread) {
    throw InvalidArgument("eps >= H (r_max - r_min): the closed form covers only smaller eps");
  }
  const double ratio = std::expm1(beta * spread) / std::expm1(beta * eps);
  return 0.5 * ratio * ratio * std::log(2.0 / delta);
}

double hoeffding_closed_form(double r_min, double r_max, double gamma, double eps, double delta) {
  check_eps_delta(eps, delta);
  const double ratio = horizon(gamma) * reward_span(r_min, r_max) / eps;
  return 0.5 * ratio * ratio * std::log(2.0 / delta);
}

std::uint64_t ceil_budget(double x) {
  constexpr double kMax = 9007199254740992.0;  // 2^53
  if (std::isnan(x) || x < 0.0) throw NumericalError("budget is not a nonnegative number");
  if (!(x <= kMax)) throw NumericalError("budget overflow");
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, x)) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(x));
}

std::uint64_t budget_extrema(double L, double diam, unsigned dim, double eps, double delta) {
  return ceil_budget(extrema_closed_form(L, diam, dim, eps, delta));
}

std::uint64_t budget_next_state(double r_min, double r_max, double gamma, double eps, double delta) {
  return ceil_budget(next_state_closed_form(r_min, r_max, gamma, eps, delta));
}

std::uint64_t budget_actions(double r_min, double r_max, double gamma, double beta, double eps,
                             double delta) {
  return ceil_budget(actions_closed_form(r_min, r_max, gamma, beta, eps, delta));
}

SampleBudget make_sample_budget(const LipschitzSpec& spec, double diam, unsigned dim,
                                RewardRange r_range, std::array<double, 3> epsilons,
                                std::array<double, 3> deltas) {
  SampleBudget b;
  b.epsilons = epsilons;
  b.deltas = deltas;
  b.diam = diam;
  b.dim = dim;
  b.r_range = r_range;
  b.batch_size = budget_extrema(lipschitz_delta(spec), diam, dim, epsilons[0], deltas[0]);
  // A constant Delta still needs one sample to be seen.
  b.batch_size = std::max<std::uint64_t>(b.batch_size, 1);
  b.n_states = budget_next_state(r_range.min, r_range.max, spec.gamma, epsilons[1], deltas[1]);
  b.n_actions =
      budget_actions(r_range.min, r_range.max, spec.gamma, spec.beta, epsilons[2], deltas[2]);
  return b;
}

double v_hat(std::span<const double> q_samples, double beta) {
  if (q_samples.empty()) throw InvalidArgument("v_hat: empty sample");
  if (!(beta > 0.0)) throw InvalidArgument("v_hat: beta must be positive");
  double m = -INFINITY;
  for (double q : q_samples) {
    if (!std::isfinite(q)) throw NumericalError("non-finite Q entry");
    m = std::max(m, q);
  }
  double acc = 0.0;
  for (double q : q_samples) acc += std::exp(beta * (q - m));
  return m + std::log(acc / static_cast<double>(q_samples.size())) / beta;
}

std::vector<double> sampled_state_values(const QTable& q, const SoftConfig& cfg, std::size_t n,
                                         Rng& rng) {
  if (n == 0) return soft_values(q, cfg);
  std::vector<double> out(q.n_states());
  std::vector<double> draws(n);
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    const auto prior = cfg.prior_row(s);
    for (std::size_t i = 0; i < n; ++i) draws[i] = q(s, rng.categorical(prior));
    out[s] = v_hat(draws, cfg.beta);
  }
  return out;
}

double sampled_next_value(const TabularMdp& mdp, std::span<const double> values, std::size_t s,
                          std::size_t a, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("sampled_next_value: need at least one sample");
  const auto succ = mdp.sparse().row(s, a);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Successor& nx = draw_successor(succ, rng);
    acc += nx.live * values[nx.state];
  }
  return acc / static_cast<double>(n);
}

BoundPair empirical_bounds(const TabularMdp& mdp, const QTable& q, const SoftConfig& cfg,
                           const EmpiricalBoundsOptions& opts, Rng& rng) {
  const std::size_t n_s = mdp.n_states();
  const std::size_t n_a = mdp.n_actions();
  if (q.n_states() != n_s || q.n_actions() != n_a) throw InvalidArgument("empirical_bounds: shape mismatch");
  if (!(opts.pad >= 0.0)) throw InvalidArgument("empirical_bounds: pad must be nonnegative");
  const SparseModel& model = mdp.sparse();
  const std::size_t rows = n_s * n_a;

  const std::vector<double> values = sampled_state_values(q, cfg, opts.n_prior_actions, rng);
  std::vector<double> ev(rows);
  std::vector<double> mass(rows);
  if (opts.n_next == 0) {
    kernels::expected_next(model, values, ev, mass, Exec::Serial);
  } else {
    for (std::size_t k = 0; k < rows; ++k) {
      // Draw next states once; the same draws give both the value and the
      // surviving mass.
      const auto succ = model.row(k / n_a, k % n_a);
      double acc_v = 0.0;
      double acc_m = 0.0;
      for (std::size_t i = 0; i < opts.n_next; ++i) {
        const Successor& nx = draw_successor(succ, rng);
        acc_v += nx.live * values[nx.state];
        acc_m += nx.live;
      }
      ev[k] = acc_v / static_cast<double>(opts.n_next);
      mass[k] = acc_m / static_cast<double>(opts.n_next);
    }
  }

  const double gamma = mdp.gamma();
  const auto qv = q.values();
  DeltaExtrema ext{INFINITY, -INFINITY};
  auto visit = [&](std::size_t s, std::size_t a) {
    if (s >= n_s || a >= n_a) throw InvalidArgument("empirical_bounds: batch index out of range");
    if (mdp.terminal(s)) return;
    const std::size_t k = s * n_a + a;
    const double delta = model.reward[k] + gamma * ev[k] - qv[k];
    ext.inf = std::min(ext.inf, delta);
    ext.sup = std::max(ext.sup, delta);
  };
  if (opts.batch.empty()) {
    for (std::size_t s = 0; s < n_s; ++s) {
      for (std::size_t a = 0; a < n_a; ++a) visit(s, a);
    }
  } else {
    for (const auto& [s, a] : opts.batch) visit(s, a);
  }

  BoundPair out{QTable(n_s, n_a), QTable(n_s, n_a), Provenance::BatchEstimated};
  auto lo = out.lower.values();
  auto hi = out.upper.values();
  if (ext.inf > ext.sup) throw InvalidArgument("empirical_bounds: batch has no non-terminal pair");
  const auto [x_lo, x_hi] =
      bracket_terms({ext.inf - opts.pad, ext.sup + opts.pad}, gamma, mdp.has_terminals());
  for (std::size_t k = 0; k < rows; ++k) {
    const double base = model.reward[k] + gamma * ev[k];
    lo[k] = base + gamma * mass[k] * x_lo;
    hi[k] = base + gamma * mass[k] * x_hi;
  }
  return out;
}

BoundPair empirical_bounds(const TabularMdp& mdp, const QTable& q, const SoftConfig& cfg,
                           const SampleBudget& budget, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    if (mdp.terminal(s)) continue;
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) pairs.emplace_back(s, a);
  }
  if (pairs.empty()) throw InvalidArgument("empirical_bounds: no non-terminal pair");
  EmpiricalBoundsOptions opts;
  opts.batch.reserve(budget.batch_size);
  for (std::uint64_t i = 0; i < budget.batch_size; ++i) opts.batch.push_back(pairs[rng.below(pairs.size())]);
  opts.n_next = budget.n_states;
  opts.n_prior_actions = budget.n_actions;
  opts.pad = budget.pad();
  return empirical_bounds(mdp, q, cfg, opts, rng);
}

}  // namespace softclip
