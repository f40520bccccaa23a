#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "softclip/rng.hpp"

namespace softclip {

/// Execution policy for the data-parallel kernels.
enum class Exec { Serial, Parallel };

/// Dense |S| x |A| table of action values, row-major by state.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t n_states, std::size_t n_actions, double fill = 0.0);
  QTable(std::size_t n_states, std::size_t n_actions, std::vector<double> values);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t s, std::size_t a) { return values_[s * n_actions_ + a]; }
  double operator()(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }

  std::span<double> row(std::size_t s) { return {values_.data() + s * n_actions_, n_actions_}; }
  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * n_actions_, n_actions_};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const QTable& other) const noexcept {
    return n_states_ == other.n_states_ && n_actions_ == other.n_actions_;
  }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> values_;
};

/// Inverse temperature and prior policy of the entropy-regularized objective.
struct SoftConfig {
  double beta = 5.0;
  std::size_t n_actions = 0;
  std::vector<double> prior;  // |S| x |A|, rows sum to one

  static SoftConfig uniform(std::size_t n_states, std::size_t n_actions, double beta);

  std::span<const double> prior_row(std::size_t s) const {
    return {prior.data() + s * n_actions, n_actions};
  }

  /// Throws InvalidArgument unless beta > 0 and the prior has the given shape
  /// with rows summing to one within 1e-12.
  void validate(std::size_t n_states, std::size_t n_actions) const;
};

/// One reachable successor of a (state, action) pair.
struct Successor {
  std::uint32_t state;
  double prob;
  double reward;  // reward realized on this outcome
  double live;    // 1 - terminal(state)
};

/// Compressed successor lists plus the data the soft kernels read.
///
/// The dense TabularMdp builds one of these at construction; learned models
/// build their own from visit counts. `defined` marks rows whose dynamics are
/// known (all rows for a true model).
struct SparseModel {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double gamma = 0.0;
  std::vector<double> reward;           // expected reward per (s, a)
  std::vector<std::size_t> row_begin;   // size |S||A| + 1
  std::vector<Successor> successors;
  std::vector<char> terminal;           // per state
  std::vector<char> defined;            // per (s, a)

  std::span<const Successor> row(std::size_t s, std::size_t a) const {
    const std::size_t k = s * n_actions + a;
    return {successors.data() + row_begin[k], row_begin[k + 1] - row_begin[k]};
  }
  bool has_terminals() const noexcept;
};

/// Successor drawn with probability `prob` using one uniform draw.
const Successor& draw_successor(std::span<const Successor> row, Rng& rng);

struct RewardRange {
  double min;
  double max;
};

/// Finite entropy-regularized MDP with dense reward and transition arrays.
///
/// Transitions into terminal states bootstrap nothing: the value of such a
/// transition is its reward. Rewards may optionally depend on the realized
/// successor (`outcome_reward`); `reward(s, a)` is then the expectation.
class TabularMdp {
 public:
  /// `transition` is |S| x |A| x |S| row-major; `outcome_reward`, when
  /// non-empty, has the same shape and `reward` must be empty (it is
  /// derived). Throws InvalidArgument on any invariant violation.
  TabularMdp(std::size_t n_states, std::size_t n_actions, double gamma, std::vector<double> reward,
             std::vector<double> transition, std::vector<char> terminal,
             std::vector<double> outcome_reward = {});

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double gamma() const noexcept { return gamma_; }

  double reward(std::size_t s, std::size_t a) const { return reward_[s * n_actions_ + a]; }
  std::span<const double> rewards() const noexcept { return reward_; }
  std::span<const double> transition_row(std::size_t s, std::size_t a) const {
    return {transition_.data() + (s * n_actions_ + a) * n_states_, n_states_};
  }
  bool terminal(std::size_t s) const { return terminal_[s] != 0; }
  std::span<const char> terminals() const noexcept { return terminal_; }
  bool has_terminals() const noexcept { return sparse_.has_terminals(); }

  bool has_outcome_rewards() const noexcept { return !outcome_reward_.empty(); }
  /// Reward realized when (s, a) lands in `next`.
  double outcome_reward(std::size_t s, std::size_t a, std::size_t next) const;

  /// Extreme rewards over non-terminal decision rows, using realized outcome
  /// rewards of reachable successors when the model has them.
  RewardRange reward_range() const noexcept { return reward_range_; }

  const SparseModel& sparse() const noexcept { return sparse_; }

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  double gamma_;
  std::vector<double> reward_;
  std::vector<double> transition_;
  std::vector<char> terminal_;
  std::vector<double> outcome_reward_;
  RewardRange reward_range_{};
  SparseModel sparse_;
};

/// Soft state value (1/beta) log sum_a prior(a) exp(beta q(a)), max-shifted
/// so that beta*q anywhere in [-700, 700] evaluates without overflow.
double soft_value(std::span<const double> q_row, std::span<const double> prior_row, double beta);

/// V(s) for every state.
std::vector<double> soft_values(const QTable& q, const SoftConfig& cfg);

/// (BQ)(s,a) = r(s,a) + gamma * sum_s' p(s'|s,a) (1 - terminal(s')) V(s').
QTable soft_backup(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg,
                   Exec exec = Exec::Serial);

struct SolveResult {
  QTable q;
  std::size_t iterations = 0;
  double residual = 0.0;  // sup-norm of the last Bellman update
};

/// Soft value iteration from Q = 0 until the sup-norm residual on Q is
/// below `tol` (so tol = 0 never converges). Throws NonConvergence carrying
/// the last residual.
SolveResult solve_soft(const TabularMdp& mdp, const SoftConfig& cfg, double tol = 1e-8,
                       std::size_t max_iters = 1'000'000, Exec exec = Exec::Parallel);

/// pi(a|s) proportional to prior(a|s) exp(beta Q(s,a)); one row per state.
std::vector<std::vector<double>> boltzmann_policy(const QTable& q, const SoftConfig& cfg);

/// Index of the largest entry (lowest index on ties).
std::size_t greedy_action(std::span<const double> q_row) noexcept;

double sup_distance(const QTable& a, const QTable& b);

struct RandomMdpOptions {
  double reward_lo = -1.0;
  double reward_hi = 1.0;
  double terminal_fraction = 0.0;  // probability that each state is terminal
  double density = 0.6;            // probability that a successor entry is nonzero
};

/// Random MDP with Unif(reward_lo, reward_hi) rewards and random sparse kernels.
TabularMdp make_random_mdp(std::size_t n_states, std::size_t n_actions, double gamma, Rng& rng,
                           const RandomMdpOptions& options = {});

}  // namespace softclip
