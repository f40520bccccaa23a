#include "softclip/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "softclip/csv.hpp"
#include "softclip/error.hpp"
#include "softclip/maze.hpp"
#include "softclip/rng.hpp"

namespace softclip {

std::string Method::name() const {
  if (clip == ClipMode::None || clip == ClipMode::Baseline) return std::string(to_string(clip));
  return std::string(to_string(clip)) + "-" + std::string(to_string(model));
}

Method parse_method(std::string_view name) {
  if (name == "none") return {ClipMode::None, ModelMode::Given};
  if (name == "baseline") return {ClipMode::Baseline, ModelMode::Given};
  const auto dash = name.rfind('-');
  if (dash != std::string_view::npos) {
    try {
      const ClipMode c = parse_clip_mode(name.substr(0, dash));
      const ModelMode m = parse_model_mode(name.substr(dash + 1));
      if (c == ClipMode::AlwaysClip || c == ClipMode::ConditionalTD) return {c, m};
    } catch (const InvalidArgument&) {
    }
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
  if (learning_rates.empty()) throw InvalidArgument("sweep: no learning rates");
  for (double a : learning_rates) {
    if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("sweep: learning rates must be in (0, 1]");
  }
  if (methods.empty()) throw InvalidArgument("sweep: no methods");
  if (n_mazes == 0 || n_seeds_per_maze == 0) throw InvalidArgument("sweep: need at least one maze and seed");
  if (maze_width < 1 || maze_height < 1) throw InvalidArgument("sweep: maze size must be positive");
  if (!(wall_prob >= 0.0 && wall_prob < 1.0)) throw InvalidArgument("sweep: wall_prob must be in [0, 1)");
  if (eval_every == 0 || env_step_budget == 0) throw InvalidArgument("sweep: budget and eval period must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("sweep: gamma must be in [0, 1)");
  if (!(beta > 0.0)) throw InvalidArgument("sweep: beta must be positive");
  if (jobs == 0) throw InvalidArgument("sweep: jobs must be positive");
}

std::pair<double, double> bootstrap_ci(std::span<const double> values, std::size_t resamples,
                                       double level, std::uint64_t seed) {
  if (values.empty()) throw InvalidArgument("bootstrap_ci: empty sample");
  if (resamples == 0) throw InvalidArgument("bootstrap_ci: need at least one resample");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("bootstrap_ci: level must be in (0, 1)");
  Rng rng(seed);
  const std::size_t n = values.size();
  std::vector<double> means(resamples);
  for (double& m : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += values[rng.below(n)];
    m = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  // Nearest-rank percentiles.
  const double tail = 0.5 * (1.0 - level);
  auto rank = [&](double p) {
    const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(resamples)));
    return means[std::clamp<std::size_t>(k, 1, resamples) - 1];
  };
  return {rank(tail), rank(1.0 - tail)};
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs, std::uint64_t seed) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> samples;
  for (const RunRecord& r : runs) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& row) {
      return row.method == r.method && row.alpha == r.alpha;
    });
    if (it == rows.end()) {
      rows.push_back({r.method, r.alpha});
      samples.emplace_back();
      it = rows.end() - 1;
    }
    if (r.status == "ok" && std::isfinite(r.auc)) samples[it - rows.begin()].push_back(r.auc);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& xs = samples[i];
    rows[i].n_runs = xs.size();
    if (xs.empty()) continue;
    double acc = 0.0;
    for (double x : xs) acc += x;
    rows[i].mean_auc = acc / static_cast<double>(xs.size());
    std::tie(rows[i].ci_low, rows[i].ci_high) = bootstrap_ci(xs, 1000, 0.95, derive_seed(seed, "bootstrap", i));
  }
  return rows;
}

MazeSpec sweep_maze(const SweepSpec& spec, std::size_t maze_id) {
  return generate_maze(spec.maze_width, spec.maze_height, spec.wall_prob,
                       derive_seed(spec.seed, "maze", maze_id));
}

std::uint64_t sweep_run_seed(const SweepSpec& spec, std::size_t maze_id, std::size_t seed_index) {
  return derive_seed(spec.seed, "run", maze_id, seed_index);
}

double curve_auc(const LearningCurve& curve) {
  return auc(curve.env_steps, curve.eval_reward_normalized);
}

namespace {

struct MazeData {
  MazeSpec spec;
  TabularMdp env;
  QTable q_star;
};

std::string run_file_name(const RunRecord& r) {
  return std::to_string(r.maze_id) + "_" + std::to_string(r.seed) + "_" + r.method.name() + "_" +
         format_double(r.alpha) + ".csv";
}

void write_file(const std::filesystem::path& path, const auto& writer) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  writer(out);
  if (!out) throw InvalidArgument("write failed: " + path.string());
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  const bool write = !out_dir.empty();
  if (write) std::filesystem::create_directories(out_dir);

  std::vector<MazeData> mazes;
  mazes.reserve(spec.n_mazes);
  for (std::size_t m = 0; m < spec.n_mazes; ++m) {
    MazeSpec ms = sweep_maze(spec, m);
    TabularMdp env = maze_to_mdp(ms, spec.gamma);
    const SoftConfig soft = SoftConfig::uniform(env.n_states(), env.n_actions(), spec.beta);
    QTable q_star = solve_soft(env, soft, 1e-10).q;
    if (write) {
      write_file(out_dir / ("maze_" + std::to_string(m) + ".txt"),
                 [&](std::ostream& o) { write_maze(o, ms); });
    }
    mazes.push_back({std::move(ms), std::move(env), std::move(q_star)});
  }

  SweepResult result;
  for (std::size_t m = 0; m < spec.n_mazes; ++m) {
    for (std::size_t k = 0; k < spec.n_seeds_per_maze; ++k) {
      for (const Method& method : spec.methods) {
        for (double alpha : spec.learning_rates) {
          RunRecord r;
          r.maze_id = m;
          r.seed = k;
          r.method = method;
          r.alpha = alpha;
          result.runs.push_back(std::move(r));
        }
      }
    }
  }

  const auto n_runs = static_cast<std::int64_t>(result.runs.size());
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(spec.jobs))
  for (std::int64_t i = 0; i < n_runs; ++i) {
    RunRecord& r = result.runs[static_cast<std::size_t>(i)];
    const MazeData& maze = mazes[r.maze_id];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      LearnerConfig cfg;
      cfg.alpha = r.alpha;
      cfg.gamma = spec.gamma;
      cfg.beta = spec.beta;
      cfg.clip_mode = r.method.clip;
      cfg.model_mode = r.method.model;
      cfg.max_env_steps = spec.env_step_budget;
      cfg.eval_every = spec.eval_every;
      cfg.seed = sweep_run_seed(spec, r.maze_id, r.seed);
      TrainOptions opts;
      opts.q_star = &maze.q_star;
      r.curve = train(maze.env, cfg, opts);
      r.auc = curve_auc(r.curve);
      r.auc_printed_ratio = auc(r.curve.env_steps, r.curve.printed_ratio);
      r.steps_to_095 = first_crossing(r.curve.env_steps, r.curve.eval_reward_normalized, 0.95,
                                      static_cast<double>(spec.env_step_budget));
      if (write) {
        write_file(out_dir / run_file_name(r), [&](std::ostream& o) { write_curve_csv(o, r.curve); });
      }
    } catch (const std::exception& e) {
      r.status = e.what();
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  result.summary = summarize(result.runs, spec.seed);
  if (write) {
    write_file(out_dir / "runs.csv", [&](std::ostream& o) { write_runs_csv(o, result.runs); });
    write_file(out_dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, result.summary); });
  }
  return result;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  write_csv_row(out, {"method", "alpha", "mean_auc", "ci_low", "ci_high", "n_runs"});
  for (const SummaryRow& r : rows) {
    write_csv_row(out, {r.method.name(), format_double(r.alpha), format_double(r.mean_auc),
                        format_double(r.ci_low), format_double(r.ci_high), std::to_string(r.n_runs)});
  }
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  write_csv_row(out, {"maze_id", "seed", "method", "alpha", "auc", "auc_printed_ratio", "steps_to_095",
                      "wall_time", "status"});
  for (const RunRecord& r : runs) {
    // Commas would split the status field.
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    write_csv_row(out, {std::to_string(r.maze_id), std::to_string(r.seed), r.method.name(),
                        format_double(r.alpha), format_double(r.auc), format_double(r.auc_printed_ratio),
                        format_double(r.steps_to_095), format_double(r.wall_time), status});
  }
}

}  // namespace softclip
