#include "softclip/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "softclip/error.hpp"
#include "softclip/kernels.hpp"

namespace softclip {

namespace {

constexpr double kRowSumTolerance = 1e-12;

void check_distribution(std::span<const double> row, const char* what) {
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument(std::string(what) + ": negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kRowSumTolerance) {
    throw InvalidArgument(std::string(what) + ": row sums to " + std::to_string(total));
  }
}

}  // namespace

QTable::QTable(std::size_t n_states, std::size_t n_actions, double fill)
    : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, fill) {}

QTable::QTable(std::size_t n_states, std::size_t n_actions, std::vector<double> values)
    : n_states_(n_states), n_actions_(n_actions), values_(std::move(values)) {
  if (values_.size() != n_states * n_actions) throw InvalidArgument("QTable: size mismatch");
}

SoftConfig SoftConfig::uniform(std::size_t n_states, std::size_t n_actions, double beta) {
  SoftConfig cfg;
  cfg.beta = beta;
  cfg.n_actions = n_actions;
  cfg.prior.assign(n_states * n_actions, 1.0 / static_cast<double>(n_actions));
  cfg.validate(n_states, n_actions);
  return cfg;
}

void SoftConfig::validate(std::size_t n_states, std::size_t n_actions_expected) const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
  if (n_actions != n_actions_expected || prior.size() != n_states * n_actions) {
    throw InvalidArgument("prior shape does not match the MDP");
  }
  for (std::size_t s = 0; s < n_states; ++s) check_distribution(prior_row(s), "prior");
}

bool SparseModel::has_terminals() const noexcept {
  return std::any_of(terminal.begin(), terminal.end(), [](char t) { return t != 0; });
}

const Successor& draw_successor(std::span<const Successor> row, Rng& rng) {
  if (row.empty()) throw InvalidArgument("draw_successor: empty row");
  const double u = rng.uniform();
  double acc = 0.0;
  for (const Successor& nx : row) {
    acc += nx.prob;
    if (u < acc) return nx;
  }
  return row.back();
}

TabularMdp::TabularMdp(std::size_t n_states, std::size_t n_actions, double gamma,
                       std::vector<double> reward, std::vector<double> transition,
                       std::vector<char> terminal, std::vector<double> outcome_reward)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      reward_(std::move(reward)),
      transition_(std::move(transition)),
      terminal_(std::move(terminal)),
      outcome_reward_(std::move(outcome_reward)) {
  if (n_states == 0 || n_actions == 0) throw InvalidArgument("MDP needs states and actions");
  if (n_states > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("too many states");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0, 1)");
  const std::size_t rows = n_states * n_actions;
  if (transition_.size() != rows * n_states) throw InvalidArgument("transition shape mismatch");
  if (terminal_.size() != n_states) throw InvalidArgument("terminal flags shape mismatch");
  for (std::size_t k = 0; k < rows; ++k) {
    check_distribution({transition_.data() + k * n_states, n_states}, "transition");
  }

  if (!outcome_reward_.empty()) {
    if (!reward_.empty()) {
      throw InvalidArgument("pass either expected rewards or outcome rewards, not both");
    }
    if (outcome_reward_.size() != rows * n_states) {
      throw InvalidArgument("outcome reward shape mismatch");
    }
    reward_.assign(rows, 0.0);
    for (std::size_t k = 0; k < rows; ++k) {
      double r = 0.0;
      for (std::size_t s2 = 0; s2 < n_states; ++s2) {
        const double p = transition_[k * n_states + s2];
        if (p > 0.0) r += p * outcome_reward_[k * n_states + s2];
      }
      reward_[k] = r;
    }
  }
  if (reward_.size() != rows) throw InvalidArgument("reward shape mismatch");
  for (double r : reward_) {
    if (!std::isfinite(r)) throw InvalidArgument("non-finite reward");
  }
  for (double r : outcome_reward_) {
    if (!std::isfinite(r)) throw InvalidArgument("non-finite reward");
  }

  sparse_.n_states = n_states;
  sparse_.n_actions = n_actions;
  sparse_.gamma = gamma;
  sparse_.reward = reward_;
  sparse_.terminal = terminal_;
  sparse_.defined.assign(rows, 1);
  sparse_.row_begin.assign(rows + 1, 0);
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t s2 = 0; s2 < n_states; ++s2) {
      const double p = transition_[k * n_states + s2];
      if (p > 0.0) {
        const double r = outcome_reward_.empty() ? reward_[k] : outcome_reward_[k * n_states + s2];
        sparse_.successors.push_back(
            {static_cast<std::uint32_t>(s2), p, r, terminal_[s2] ? 0.0 : 1.0});
      }
    }
    sparse_.row_begin[k + 1] = sparse_.successors.size();
  }

  const bool all_terminal =
      std::all_of(terminal_.begin(), terminal_.end(), [](char t) { return t != 0; });
  reward_range_ = {INFINITY, -INFINITY};
  for (std::size_t s = 0; s < n_states; ++s) {
    if (terminal_[s] && !all_terminal) continue;
    for (std::size_t a = 0; a < n_actions; ++a) {
      if (outcome_reward_.empty()) {
        reward_range_.min = std::min(reward_range_.min, this->reward(s, a));
        reward_range_.max = std::max(reward_range_.max, this->reward(s, a));
      } else {
        for (const Successor& nx : sparse_.row(s, a)) {
          reward_range_.min = std::min(reward_range_.min, nx.reward);
          reward_range_.max = std::max(reward_range_.max, nx.reward);
        }
      }
    }
  }
}

double TabularMdp::outcome_reward(std::size_t s, std::size_t a, std::size_t next) const {
  if (outcome_reward_.empty()) return reward(s, a);
  return outcome_reward_[(s * n_actions_ + a) * n_states_ + next];
}

double soft_value(std::span<const double> q_row, std::span<const double> prior_row, double beta) {
  if (q_row.empty()) throw InvalidArgument("soft_value: empty row");
  if (q_row.size() != prior_row.size()) throw InvalidArgument("soft_value: length mismatch");
  if (!(beta > 0.0)) throw InvalidArgument("soft_value: beta must be positive");
  double m = -INFINITY;
  for (std::size_t a = 0; a < q_row.size(); ++a) {
    if (!std::isfinite(q_row[a])) throw NumericalError("non-finite Q entry");
    if (prior_row[a] > 0.0) m = std::max(m, q_row[a]);
  }
  if (m == -INFINITY) throw InvalidArgument("soft_value: prior has no mass");
  double acc = 0.0;
  for (std::size_t a = 0; a < q_row.size(); ++a) {
    if (prior_row[a] > 0.0) acc += prior_row[a] * std::exp(beta * (q_row[a] - m));
  }
  return m + std::log(acc) / beta;
}

std::vector<double> soft_values(const QTable& q, const SoftConfig& cfg) {
  std::vector<double> v(q.n_states());
  kernels::state_values(q, cfg, v, Exec::Serial);
  return v;
}

QTable soft_backup(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg, Exec exec) {
  if (q.n_states() != mdp.n_states() || q.n_actions() != mdp.n_actions()) {
    throw InvalidArgument("soft_backup: Q shape does not match the MDP");
  }
  if (cfg.prior.size() != q.size()) throw InvalidArgument("soft_backup: prior shape mismatch");
  std::vector<double> v(q.n_states());
  std::vector<double> ev(q.size());
  std::vector<double> mass(q.size());
  kernels::state_values(q, cfg, v, exec);
  kernels::expected_next(mdp.sparse(), v, ev, mass, exec);
  QTable out(q.n_states(), q.n_actions());
  kernels::backup_from(mdp.sparse(), ev, out.values(), exec);
  return out;
}

SolveResult solve_soft(const TabularMdp& mdp, const SoftConfig& cfg, double tol,
                       std::size_t max_iters, Exec exec) {
  if (!(tol >= 0.0)) throw InvalidArgument("solve_soft: tol must be nonnegative");
  if (max_iters == 0) throw InvalidArgument("solve_soft: max_iters must be positive");
  cfg.validate(mdp.n_states(), mdp.n_actions());

  const std::size_t rows = mdp.n_states() * mdp.n_actions();
  QTable q(mdp.n_states(), mdp.n_actions());
  QTable next(mdp.n_states(), mdp.n_actions());
  std::vector<double> v(mdp.n_states());
  std::vector<double> ev(rows);
  std::vector<double> mass(rows);
  double residual = INFINITY;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    kernels::state_values(q, cfg, v, exec);
    kernels::expected_next(mdp.sparse(), v, ev, mass, exec);
    kernels::backup_from(mdp.sparse(), ev, next.values(), exec);
    residual = kernels::sup_distance(next.values(), q.values(), exec);
    std::swap(q, next);
    if (residual < tol) return {std::move(q), it, residual};
  }
  throw NonConvergence(max_iters, residual);
}

std::vector<std::vector<double>> boltzmann_policy(const QTable& q, const SoftConfig& cfg) {
  if (cfg.prior.size() != q.size()) throw InvalidArgument("boltzmann_policy: shape mismatch");
  std::vector<std::vector<double>> pi(q.n_states());
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    const auto row = q.row(s);
    const auto prior = cfg.prior_row(s);
    double m = -INFINITY;
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (prior[a] > 0.0) m = std::max(m, row[a]);
    }
    auto& out = pi[s];
    out.resize(row.size());
    double total = 0.0;
    for (std::size_t a = 0; a < row.size(); ++a) {
      out[a] = prior[a] > 0.0 ? prior[a] * std::exp(cfg.beta * (row[a] - m)) : 0.0;
      total += out[a];
    }
    for (double& p : out) p /= total;
  }
  return pi;
}

std::size_t greedy_action(std::span<const double> q_row) noexcept {
  std::size_t best = 0;
  for (std::size_t a = 1; a < q_row.size(); ++a) {
    if (q_row[a] > q_row[best]) best = a;
  }
  return best;
}

double sup_distance(const QTable& a, const QTable& b) {
  if (!a.same_shape(b)) throw InvalidArgument("sup_distance: shape mismatch");
  return kernels::sup_distance(a.values(), b.values(), Exec::Serial);
}

TabularMdp make_random_mdp(std::size_t n_states, std::size_t n_actions, double gamma, Rng& rng,
                           const RandomMdpOptions& options) {
  const std::size_t rows = n_states * n_actions;
  std::vector<double> reward(rows);
  for (double& r : reward) r = rng.uniform(options.reward_lo, options.reward_hi);
  std::vector<double> transition(rows * n_states, 0.0);
  for (std::size_t k = 0; k < rows; ++k) {
    double* row = transition.data() + k * n_states;
    double total = 0.0;
    for (std::size_t s2 = 0; s2 < n_states; ++s2) {
      if (rng.bernoulli(options.density)) {
        row[s2] = rng.uniform();
        total += row[s2];
      }
    }
    if (total == 0.0) {
      row[rng.below(n_states)] = 1.0;
      total = 1.0;
    }
    for (std::size_t s2 = 0; s2 < n_states; ++s2) row[s2] /= total;
    // Renormalization can leave the sum a few ulps away from one; push the
    // remainder into the largest entry.
    double sum = 0.0;
    std::size_t largest = 0;
    for (std::size_t s2 = 0; s2 < n_states; ++s2) {
      sum += row[s2];
      if (row[s2] > row[largest]) largest = s2;
    }
    row[largest] += 1.0 - sum;
  }
  std::vector<char> terminal(n_states, 0);
  for (auto& t : terminal) t = rng.bernoulli(options.terminal_fraction) ? 1 : 0;
  return TabularMdp(n_states, n_actions, gamma, std::move(reward), std::move(transition),
                    std::move(terminal));
}

}  // namespace softclip
