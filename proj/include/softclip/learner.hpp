#pragma once

// Tabular soft Q-learning with optional clipping of the whole Q-table into
// bounds on Q*, in the "always clip" and "TD only if nothing was clipped"
// variants, using either the true model or a count-based learned model to
// compute the bounds.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "softclip/bounds.hpp"
#include "softclip/maze.hpp"
#include "softclip/mdp.hpp"

namespace softclip {

enum class ClipMode { None, Baseline, AlwaysClip, ConditionalTD };
enum class ModelMode { Given, Learned };

std::string_view to_string(ClipMode m) noexcept;
std::string_view to_string(ModelMode m) noexcept;
/// Accepts "none", "baseline", "always-clip", "conditional-td". Throws InvalidArgument.
ClipMode parse_clip_mode(std::string_view text);
/// Accepts "given", "learned". Throws InvalidArgument.
ModelMode parse_model_mode(std::string_view text);

struct LearnerConfig {
  double alpha = 0.1;
  double gamma = 0.98;  // must match the environment's discount
  double beta = 5.0;
  ClipMode clip_mode = ClipMode::None;
  ModelMode model_mode = ModelMode::Given;
  double q_init_low = -1.0;
  double q_init_high = 1.0;
  std::size_t max_env_steps = 20000;
  std::size_t eval_every = 500;
  std::uint64_t seed = 0;
  std::size_t episode_cap = 400;     // training and evaluation episodes
  std::size_t eval_episodes = 3;
  std::size_t recompute_every = 1;   // bound recomputation period, in env steps
  double tighten_slack = 1e-9;       // rounding allowance when intersecting bounds

  void validate() const;
};

/// Count-based estimate of the dynamics seen so far.
class LearnedModel {
 public:
  LearnedModel(std::size_t n_states, std::size_t n_actions, double gamma);

  void update(std::size_t s, std::size_t a, const Transition& tr);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  std::uint64_t visits(std::size_t s, std::size_t a) const { return total_[s * n_actions_ + a]; }
  bool visited(std::size_t s, std::size_t a) const { return visits(s, a) > 0; }
  std::uint64_t count(std::size_t s, std::size_t a, std::size_t next) const;
  /// Mean observed reward of (s, a); NaN if never visited.
  double reward(std::size_t s, std::size_t a) const;
  /// counts / total as a dense row; all zeros if never visited.
  std::vector<double> empirical_row(std::size_t s, std::size_t a) const;
  /// True once a transition into `s` has reported termination.
  bool known_terminal(std::size_t s) const { return terminal_[s] != 0; }

  /// Writes the empirical kernel into `out`, reusing its storage. Unvisited
  /// rows are marked undefined.
  void to_sparse(SparseModel& out) const;

 private:
  struct Entry {
    std::uint32_t state;
    std::uint64_t count;
    double reward_sum;
  };
  std::size_t n_states_;
  std::size_t n_actions_;
  double gamma_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<std::uint64_t> total_;
  std::vector<double> reward_sum_;
  std::vector<char> terminal_;
};

void update_learned_model(LearnedModel& model, std::size_t s, std::size_t a, const Transition& tr);

/// One TD step on Q(s, a):
///   Q(s,a) += alpha (r + gamma (1 - terminated) V(s') - Q(s,a)).
/// Returns the new value.
double td_update(QTable& q, std::size_t s, std::size_t a, const Transition& tr,
                 const LearnerConfig& cfg, const SoftConfig& soft);

struct LearningCurve {
  std::vector<double> env_steps;
  std::vector<double> eval_reward;             // mean undiscounted greedy return
  std::vector<double> eval_reward_normalized;
  std::vector<double> printed_ratio;
  std::vector<double> q_mean;
  std::vector<double> q_min;
  std::vector<double> q_max;
  std::vector<double> lower_mean;
  std::vector<double> upper_mean;
  std::vector<double> lower_min;
  std::vector<double> upper_max;
  std::vector<double> clip_events;  // entries moved by clipping since the previous point

  std::size_t crossed_entries = 0;    // clamp skipped because L > U
  std::size_t tighten_failures = 0;   // fresh bounds disagreed with running ones
  std::size_t eval_resamples = 0;     // evaluation redraws forced by optimal <= uniform
  std::size_t eval_carried = 0;       // evaluation points that reused the previous value
  QTable final_q;

  std::size_t size() const noexcept { return env_steps.size(); }
};

/// Header: env_steps,eval_reward,eval_reward_normalized,q_mean,q_min,q_max,
/// lower_mean,upper_mean,clip_events
void write_curve_csv(std::ostream& out, const LearningCurve& curve);
LearningCurve read_curve_csv(std::istream& in);

/// Per-step view handed to TrainOptions::observer after the step completes.
struct StepInfo {
  std::size_t step;  // 1-based env step
  std::size_t state;
  std::size_t action;
  Transition transition;
  const QTable& q;
  const BoundPair* bounds;  // bounds used this step, null without clipping
};

struct TrainOptions {
  /// Optimal Q of the environment, used for evaluation; solved if null.
  const QTable* q_star = nullptr;
  /// Replace every computed bound by (-inf, +inf).
  bool force_unbounded = false;
  std::function<void(const StepInfo&)> observer;
};

/// Runs the learner selected by cfg.clip_mode / cfg.model_mode.
LearningCurve train(const TabularMdp& env, const LearnerConfig& cfg, const TrainOptions& opts = {});

/// train() with clip_mode forced to AlwaysClip / ConditionalTD.
LearningCurve run_always_clip(const TabularMdp& env, LearnerConfig cfg, const TrainOptions& opts = {});
LearningCurve run_conditional_td(const TabularMdp& env, LearnerConfig cfg,
                                 const TrainOptions& opts = {});

struct EvalResult {
  double agent = 0.0;
  double optimal = 0.0;
  double uniform = 0.0;
  std::size_t resamples = 0;
  bool degenerate = false;  // optimal <= uniform after all redraws
};

/// Greedy-agent, greedy-optimal and uniform-random returns averaged over
/// cfg.eval_episodes episodes. The three policies share start states and
/// environment noise. `point` indexes the evaluation within a run.
EvalResult evaluate(const TabularMdp& env, const QTable& q, const QTable& q_star,
                    const LearnerConfig& cfg, std::size_t point);

}  // namespace softclip
