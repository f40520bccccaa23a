#pragma once

// Learning-rate sweeps over random mazes: runs every (maze, seed, method,
// alpha) combination, scores each learning curve by its normalized AUC and
// aggregates per (method, alpha) with bootstrap confidence intervals.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "softclip/learner.hpp"
#include "softclip/metrics.hpp"

namespace softclip {

struct Method {
  ClipMode clip = ClipMode::None;
  ModelMode model = ModelMode::Given;

  /// "none", "baseline", or "<clip>-<model>" such as "conditional-td-given".
  std::string name() const;
  bool operator==(const Method&) const = default;
};

/// Inverse of Method::name(). Throws InvalidArgument.
Method parse_method(std::string_view name);

struct SweepSpec {
  std::vector<double> learning_rates{0.05, 0.1, 0.2, 0.4, 0.8};
  std::size_t n_mazes = 10;
  std::size_t n_seeds_per_maze = 5;
  int maze_width = 7;
  int maze_height = 7;
  double wall_prob = 0.2;
  std::vector<Method> methods{{ClipMode::None, ModelMode::Given},
                              {ClipMode::ConditionalTD, ModelMode::Given}};
  std::size_t env_step_budget = 50000;
  std::size_t eval_every = 1250;
  double gamma = 0.98;
  double beta = 5.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;  // worker threads

  void validate() const;
};

struct RunRecord {
  std::size_t maze_id = 0;
  std::size_t seed = 0;  // seed index within the maze
  Method method;
  double alpha = 0.0;
  LearningCurve curve;
  double auc = NAN;                // of the normalized evaluation reward
  double auc_printed_ratio = NAN;  // same integral of printed_ratio()
  double steps_to_095 = NAN;       // first logged step with normalized reward >= 0.95
  double wall_time = 0.0;          // seconds
  std::string status = "ok";       // or the error message of a failed run
};

struct SummaryRow {
  Method method;
  double alpha = 0.0;
  double mean_auc = NAN;
  double ci_low = NAN;
  double ci_high = NAN;
  std::size_t n_runs = 0;
};

struct SweepResult {
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
};

/// Percentile bootstrap interval for the mean.
std::pair<double, double> bootstrap_ci(std::span<const double> values, std::size_t resamples,
                                       double level, std::uint64_t seed);

/// Mean AUC and 95% bootstrap interval (1000 resamples) per (method, alpha)
/// over successful runs, in the order methods and alphas first appear.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs, std::uint64_t seed);

/// Maze `maze_id` of a sweep and the learner seed of run (maze_id, seed_index).
MazeSpec sweep_maze(const SweepSpec& spec, std::size_t maze_id);
std::uint64_t sweep_run_seed(const SweepSpec& spec, std::size_t maze_id, std::size_t seed_index);

/// Runs the sweep. When `out_dir` is non-empty it receives maze_<id>.txt,
/// one curve CSV per run named <maze>_<seed>_<method>_<alpha>.csv,
/// runs.csv and summary.csv. Failed runs are recorded and skipped.
SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir = {});

/// method,alpha,mean_auc,ci_low,ci_high,n_runs
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
/// maze_id,seed,method,alpha,auc,auc_printed_ratio,steps_to_095,wall_time,status
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);

/// AUC of a curve's normalized evaluation reward.
double curve_auc(const LearningCurve& curve);

}  // namespace softclip
