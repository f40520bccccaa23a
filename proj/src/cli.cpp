#include "softclip/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "softclip/bounds.hpp"
#include "softclip/csv.hpp"
#include "softclip/error.hpp"
#include "softclip/experiment.hpp"
#include "softclip/learner.hpp"
#include "softclip/maze.hpp"
#include "softclip/mdp_io.hpp"
#include "softclip/pac.hpp"

namespace softclip {

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string_view key = trim(t.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.remove_prefix(1);
    if (key.empty()) throw InvalidArgument(path + ":" + std::to_string(line_no) + ": empty key");
    out[std::string(key)] = std::string(trim(t.substr(eq + 1)));
  }
  return out;
}

namespace {

const std::vector<std::string> kCommands{"solve", "train", "sweep", "pac-budget", "check-bounds"};

std::string flag_key(const std::string& token) {
  if (token.size() < 3 || token.compare(0, 2, "--") != 0) return {};
  return token.substr(2, token.find('=') - 2);
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw InvalidArgument("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return rest;

  std::set<std::string> given;
  for (const auto& a : rest) {
    if (const auto k = flag_key(a); !k.empty()) given.insert(k);
  }
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(*path)) {
    if (given.count(key)) continue;
    const auto fields = split(value, ' ');
    if (fields.size() <= 1) {
      injected.push_back("--" + key + "=" + value);
    } else {
      injected.push_back("--" + key);
      for (auto f : fields) injected.emplace_back(f);
    }
  }
  auto pos = std::find_if(rest.begin(), rest.end(), [](const std::string& a) {
    return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
  });
  if (pos != rest.end()) ++pos;
  rest.insert(pos, injected.begin(), injected.end());
  return rest;
}

namespace {

struct Violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnvOptions {
  std::vector<int> maze_size{7, 7};
  double wall_prob = 0.2;
  std::string maze_file;
  std::string mdp_file;
};

void add_env_options(CLI::App* cmd, EnvOptions& o) {
  cmd->add_option("--maze-size", o.maze_size, "Maze width and height")->expected(2);
  cmd->add_option("--wall-prob", o.wall_prob, "Wall probability of generated mazes");
  cmd->add_option("--maze", o.maze_file, "Maze text file (instead of a generated maze)");
  cmd->add_option("--mdp", o.mdp_file, "MDP text file (instead of a maze; its gamma is used)");
}

struct Env {
  std::optional<MazeSpec> maze;
  TabularMdp mdp;
};

MazeSpec make_maze(const EnvOptions& o, std::uint64_t seed) {
  if (!o.maze_file.empty()) {
    std::ifstream in(o.maze_file);
    if (!in) throw InvalidArgument("cannot read " + o.maze_file);
    return read_maze(in);
  }
  return generate_maze(o.maze_size[0], o.maze_size[1], o.wall_prob, derive_seed(seed, "maze"));
}

Env make_env(const EnvOptions& o, double gamma, std::uint64_t seed) {
  if (!o.mdp_file.empty()) {
    if (!o.maze_file.empty()) throw InvalidArgument("--mdp and --maze are exclusive");
    return {std::nullopt, load_mdp(o.mdp_file)};
  }
  MazeSpec spec = make_maze(o, seed);
  TabularMdp mdp = maze_to_mdp(spec, gamma);
  return {std::move(spec), std::move(mdp)};
}

void note_gamma(std::ostream& err, const EnvOptions& o, const TabularMdp& mdp) {
  if (!o.mdp_file.empty()) err << "gamma from " << o.mdp_file << ": " << format_double(mdp.gamma()) << '\n';
}

/// Runs `write` against `path`, or against `out` when path is "-".
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path == "-") {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path + " for writing");
  write(f);
  if (!f) throw InvalidArgument("write failed: " + path);
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

/// One line per grid row: soft state values of open cells, '#' for walls.
void render_values(std::ostream& out, const MazeSpec& spec, const std::vector<double>& v) {
  const MazeIndex idx(spec);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const Cell c{x, y};
      std::string text = spec.open(c) ? fixed(v[idx.state(c)], 2) : "#";
      if (c == spec.goal) text = "G";
      out << std::setw(8) << text;
    }
    out << '\n';
  }
}

void log_config(std::ostream& err, const CLI::App* cmd) {
  err << "# " << cmd->get_name() << " config\n";
  for (const CLI::Option* opt : cmd->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name.empty()) continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? " " : "") + res[i];
    } else {
      value = opt->get_default_str();
      if (value.empty() && opt->get_type_size() == 0) value = "false";
      // Vector defaults print as [a,b].
      if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
        value = value.substr(1, value.size() - 2);
        std::replace(value.begin(), value.end(), ',', ' ');
      }
    }
    err << name << "=" << value << '\n';
  }
}

// ---- solve ----

struct SolveOptions {
  EnvOptions env;
  double gamma = 0.98;
  double beta = 5.0;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  std::string out = "-";
  std::string grid_out;
};

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const Env env = make_env(o.env, o.gamma, o.seed);
  note_gamma(err, o.env, env.mdp);
  const SoftConfig soft = SoftConfig::uniform(env.mdp.n_states(), env.mdp.n_actions(), o.beta);
  const SolveResult res = solve_soft(env.mdp, soft, o.tol, o.max_iter);
  err << "converged: iterations=" << res.iterations << " residual=" << format_double(res.residual) << '\n';
  emit(o.out, out, [&](std::ostream& s) { write_q_csv(s, res.q); });
  if (env.maze) {
    const std::vector<double> v = soft_values(res.q, soft);
    if (o.grid_out.empty()) {
      render_values(err, *env.maze, v);
    } else {
      emit(o.grid_out, out, [&](std::ostream& s) { render_values(s, *env.maze, v); });
    }
  }
  return kExitOk;
}

// ---- train ----

struct TrainCliOptions {
  EnvOptions env;
  std::string clip_mode = "none";
  std::string model_mode = "given";
  double alpha = 0.1;
  double gamma = 0.98;
  double beta = 5.0;
  std::size_t budget = 20000;
  std::size_t eval_every = 500;
  std::uint64_t seed = 0;
  std::string out = "-";
};

int cmd_train(const TrainCliOptions& o, std::ostream& out, std::ostream& err) {
  const Env env = make_env(o.env, o.gamma, o.seed);
  note_gamma(err, o.env, env.mdp);
  LearnerConfig cfg;
  cfg.alpha = o.alpha;
  cfg.gamma = env.mdp.gamma();
  cfg.beta = o.beta;
  cfg.clip_mode = parse_clip_mode(o.clip_mode);
  cfg.model_mode = parse_model_mode(o.model_mode);
  cfg.max_env_steps = o.budget;
  cfg.eval_every = o.eval_every;
  cfg.seed = o.seed;
  const LearningCurve curve = train(env.mdp, cfg);
  emit(o.out, out, [&](std::ostream& s) { write_curve_csv(s, curve); });
  err << "auc=" << format_double(curve_auc(curve)) << " steps_to_095="
      << format_double(first_crossing(curve.env_steps, curve.eval_reward_normalized, 0.95,
                                      static_cast<double>(o.budget)))
      << " crossed_entries=" << curve.crossed_entries << " tighten_failures=" << curve.tighten_failures
      << '\n';
  return kExitOk;
}

// ---- sweep ----

struct SweepCliOptions {
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.4, 0.8};
  std::size_t mazes = 10;
  std::size_t seeds = 5;
  std::vector<int> maze_size{7, 7};
  double wall_prob = 0.2;
  std::vector<std::string> methods{"none", "conditional-td-given"};
  std::size_t budget = 50000;
  std::size_t eval_every = 1250;
  double gamma = 0.98;
  double beta = 5.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out_dir;
};

int cmd_sweep(const SweepCliOptions& o, std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  spec.learning_rates = o.alphas;
  spec.n_mazes = o.mazes;
  spec.n_seeds_per_maze = o.seeds;
  spec.maze_width = o.maze_size[0];
  spec.maze_height = o.maze_size[1];
  spec.wall_prob = o.wall_prob;
  spec.methods.clear();
  for (const auto& m : o.methods) spec.methods.push_back(parse_method(m));
  spec.env_step_budget = o.budget;
  spec.eval_every = o.eval_every;
  spec.gamma = o.gamma;
  spec.beta = o.beta;
  spec.seed = o.seed;
  spec.jobs = o.jobs;
  const SweepResult res = run_sweep(spec, o.out_dir);
  write_summary_csv(out, res.summary);
  const auto failed = std::count_if(res.runs.begin(), res.runs.end(),
                                    [](const RunRecord& r) { return r.status != "ok"; });
  err << "runs=" << res.runs.size() << " failed=" << failed << '\n';
  return kExitOk;
}

// ---- pac-budget ----

struct PacOptions {
  std::vector<double> eps{0.5};
  std::vector<double> delta{0.05};
  double gamma = 0.98;
  double beta = 5.0;
  double L_r = 0.0;
  double L_p = 0.0;
  double L_Q = 0.0;
  double L_kappa = 0.0;
  std::optional<double> L_delta;
  double diam = 1.0;
  unsigned dim = 1;
  double r_min = 0.0;
  double r_max = 1.0;
  std::string csv;
};

std::array<double, 3> three(const std::vector<double>& v, const char* name) {
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw InvalidArgument(std::string(name) + " takes 1 or 3 values");
}

std::string budget_text(const std::function<std::uint64_t()>& f) {
  try {
    return std::to_string(f());
  } catch (const NumericalError&) {
    return "overflow";
  }
}

std::string join(const std::array<double, 3>& v) {
  return format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]);
}

int cmd_pac_budget(const PacOptions& o, std::ostream& out) {
  const auto eps = three(o.eps, "--eps");
  const auto delta = three(o.delta, "--delta");
  for (int i = 0; i < 3; ++i) {
    if (!(eps[i] > 0.0)) throw InvalidArgument("unbounded budget: eps must be positive");
    if (!(delta[i] > 0.0 && delta[i] < 1.0)) throw InvalidArgument("delta must be in (0, 1)");
  }
  if (!(o.r_max >= o.r_min)) throw InvalidArgument("r-max must be at least r-min");
  if (!(o.diam > 0.0) || o.dim == 0) throw InvalidArgument("diam and dim must be positive");
  const LipschitzSpec lip{o.L_r, o.L_p, o.L_Q, o.L_kappa, o.beta, o.gamma};
  lip.validate();
  const double L = o.L_delta ? *o.L_delta : lipschitz_delta(lip);
  if (!(L >= 0.0)) throw InvalidArgument("L-delta must be nonnegative");

  const double spread = (o.r_max - o.r_min) / (1.0 - o.gamma);
  const std::string batch = budget_text([&] {
    return std::max<std::uint64_t>(1, budget_extrema(L, o.diam, o.dim, eps[0], delta[0]));
  });
  const std::string n_s =
      budget_text([&] { return budget_next_state(o.r_min, o.r_max, o.gamma, eps[1], delta[1]); });
  const std::string n_a =
      eps[2] >= spread ? "n/a"
                       : budget_text([&] {
                           return budget_actions(o.r_min, o.r_max, o.gamma, o.beta, eps[2], delta[2]);
                         });
  const std::string hoeffding = budget_text([&] {
    return ceil_budget(hoeffding_closed_form(o.r_min, o.r_max, o.gamma, eps[2], delta[2]));
  });

  const std::vector<std::pair<std::string, std::string>> rows{
      {"eps", join(eps)},
      {"delta", join(delta)},
      {"gamma", format_double(o.gamma)},
      {"beta", format_double(o.beta)},
      {"L_r", format_double(o.L_r)},
      {"L_p", format_double(o.L_p)},
      {"L_Q", format_double(o.L_Q)},
      {"L_kappa", format_double(o.L_kappa)},
      {"diam", format_double(o.diam)},
      {"dim", std::to_string(o.dim)},
      {"r_min", format_double(o.r_min)},
      {"r_max", format_double(o.r_max)},
      {"L_delta", format_double(L)},
      {"batch_size", batch},
      {"n_states", n_s},
      {"n_actions", n_a},
      {"n_actions_hoeffding", hoeffding},
      {"pad", format_double(eps[0] + eps[1] + eps[2])},
      {"confidence", format_double(1.0 - delta[0] - 2.0 * delta[1] - 2.0 * delta[2])},
  };
  for (const auto& [k, v] : rows) out << std::left << std::setw(22) << k << v << '\n';
  if (!o.csv.empty()) {
    emit(o.csv, out, [&](std::ostream& s) {
      write_csv_row(s, {"quantity", "value"});
      for (const auto& [k, v] : rows) write_csv_row(s, {k, v});
    });
  }
  return kExitOk;
}

// ---- check-bounds ----

struct CheckOptions {
  EnvOptions env;
  std::string model = "maze";
  std::size_t states = 10;
  std::size_t actions = 3;
  double terminal_fraction = 0.0;
  double gamma = 0.98;
  double beta = 5.0;
  std::uint64_t seed = 0;
  std::string q = "random";
  std::string q_file;
  std::size_t trials = 100;
  double q_low = -1.0;
  double q_high = 1.0;
  double slack = 1e-9;
  double tol = 1e-10;
  std::string export_bounds;
};

std::size_t count_outside(const BoundPair& b, const QTable& q_star, double slack, double& worst) {
  if (b.lower.n_states() != q_star.n_states() || b.lower.n_actions() != q_star.n_actions()) {
    throw InvalidArgument("bounds shape does not match the model");
  }
  std::size_t n = 0;
  for (std::size_t s = 0; s < q_star.n_states(); ++s) {
    for (std::size_t a = 0; a < q_star.n_actions(); ++a) {
      const double excess = std::max(b.lower(s, a) - q_star(s, a), q_star(s, a) - b.upper(s, a));
      if (excess > slack || std::isnan(excess)) {
        ++n;
        worst = std::max(worst, std::isnan(excess) ? INFINITY : excess);
      }
    }
  }
  return n;
}

int cmd_check_bounds(const CheckOptions& o, std::ostream& out) {
  std::optional<TabularMdp> mdp;
  if (o.model == "random-mdp") {
    Rng rng(o.seed, "model");
    RandomMdpOptions ro;
    ro.terminal_fraction = o.terminal_fraction;
    mdp.emplace(make_random_mdp(o.states, o.actions, o.gamma, rng, ro));
  } else {
    mdp.emplace(make_env(o.env, o.gamma, o.seed).mdp);
  }
  const SoftConfig soft = SoftConfig::uniform(mdp->n_states(), mdp->n_actions(), o.beta);
  const QTable q_star = solve_soft(*mdp, soft, o.tol).q;
  BoundPair last;
  double worst = 0.0;
  std::size_t bad = 0;
  std::size_t total = 0;
  std::string unit = "trials";

  if (o.q == "random") {
    if (o.trials == 0) throw InvalidArgument("--trials must be positive");
    for (std::size_t t = 0; t < o.trials; ++t) {
      Rng rng(o.seed, "check-q", t);
      QTable q(mdp->n_states(), mdp->n_actions());
      for (double& x : q.values()) x = rng.uniform(o.q_low, o.q_high);
      last = theorem1_bounds(q, *mdp, soft);
      if (count_outside(last, q_star, o.slack, worst) > 0) ++bad;
    }
    total = o.trials;
  } else if (o.q == "solved") {
    last = theorem1_bounds(q_star, *mdp, soft);
    bad = count_outside(last, q_star, o.slack, worst);
    total = q_star.values().size();
    unit = "entries";
    double width = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
      width = std::max(width, last.upper.values()[k] - last.lower.values()[k]);
    }
    const double g = mdp->gamma();
    const double tolerance = (1.0 + 2.0 * g / (1.0 - g)) * o.tol;
    out << "max(U-L): " << format_double(width) << '\n';
    out << "tightness tolerance: " << format_double(tolerance) << '\n';
    if (width > tolerance) bad = std::max<std::size_t>(bad, 1);
  } else if (o.q == "file") {
    if (o.q_file.empty()) throw InvalidArgument("--q file needs --q-file");
    std::ifstream in(o.q_file);
    if (!in) throw InvalidArgument("cannot read " + o.q_file);
    std::string header;
    std::getline(in, header);
    in.seekg(0);
    if (header.find("lower") != std::string::npos) {
      last = read_bounds_csv(in);
    } else {
      const QTable q = read_q_csv(in);
      if (q.n_states() != mdp->n_states() || q.n_actions() != mdp->n_actions()) {
        throw InvalidArgument("Q shape does not match the model");
      }
      last = theorem1_bounds(q, *mdp, soft);
    }
    bad = count_outside(last, q_star, o.slack, worst);
    total = q_star.values().size();
    unit = "entries";
  } else {
    throw InvalidArgument("--q must be random, solved or file");
  }

  out << "violations: " << bad << "/" << total << '\n';
  if (bad > 0) out << "worst excess: " << format_double(worst) << " (" << unit << " counted)\n";
  if (!o.export_bounds.empty()) {
    emit(o.export_bounds, out, [&](std::ostream& s) { write_bounds_csv(s, last); });
  }
  if (bad > 0) throw Violation("bounds violated");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds on optimal soft Q-functions, clipped soft Q-learning and maze experiments",
               "softclip"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SolveOptions solve_o;
  auto* solve = app.add_subcommand("solve", "Solve the soft Bellman equation; writes the Q* CSV");
  add_env_options(solve, solve_o.env);
  solve->add_option("--gamma", solve_o.gamma, "Discount");
  solve->add_option("--beta", solve_o.beta, "Inverse temperature");
  solve->add_option("--seed", solve_o.seed, "Seed of the generated maze");
  solve->add_option("--tol", solve_o.tol, "Stop when the sup-norm residual is below this");
  solve->add_option("--max-iter", solve_o.max_iter, "Iteration cap");
  solve->add_option("--out", solve_o.out, "Q* CSV path, - for stdout");
  solve->add_option("--grid-out", solve_o.grid_out, "Value grid path (default: stderr)");

  TrainCliOptions train_o;
  auto* train_cmd = app.add_subcommand("train", "Train one learner; writes its learning curve CSV");
  add_env_options(train_cmd, train_o.env);
  train_cmd->add_option("--clip-mode", train_o.clip_mode, "Clipping rule")
      ->check(CLI::IsMember({"none", "baseline", "always-clip", "conditional-td"}));
  train_cmd->add_option("--model,--model-mode", train_o.model_mode, "Model used for bounds")
      ->check(CLI::IsMember({"given", "learned"}));
  train_cmd->add_option("--alpha", train_o.alpha, "Learning rate")->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--gamma", train_o.gamma, "Discount");
  train_cmd->add_option("--beta", train_o.beta, "Inverse temperature");
  train_cmd->add_option("--budget", train_o.budget, "Environment steps");
  train_cmd->add_option("--eval-every", train_o.eval_every, "Steps between evaluations");
  train_cmd->add_option("--seed", train_o.seed, "Seed of maze, initialization, environment and evaluation");
  train_cmd->add_option("--out", train_o.out, "Curve CSV path, - for stdout");

  SweepCliOptions sweep_o;
  auto* sweep = app.add_subcommand("sweep", "Learning-rate sweep over random mazes");
  sweep->add_option("--alphas", sweep_o.alphas, "Learning rates")->delimiter(',');
  sweep->add_option("--mazes", sweep_o.mazes, "Number of mazes");
  sweep->add_option("--seeds", sweep_o.seeds, "Seeds per maze");
  sweep->add_option("--maze-size", sweep_o.maze_size, "Maze width and height")->expected(2);
  sweep->add_option("--wall-prob", sweep_o.wall_prob, "Wall probability");
  sweep->add_option("--methods", sweep_o.methods,
                    "Methods: none, baseline, always-clip-given, always-clip-learned, "
                    "conditional-td-given, conditional-td-learned")
      ->delimiter(',');
  sweep->add_option("--budget", sweep_o.budget, "Environment steps per run");
  sweep->add_option("--eval-every", sweep_o.eval_every, "Steps between evaluations");
  sweep->add_option("--gamma", sweep_o.gamma, "Discount");
  sweep->add_option("--beta", sweep_o.beta, "Inverse temperature");
  sweep->add_option("--seed", sweep_o.seed, "Sweep seed");
  sweep->add_option("--jobs", sweep_o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out-dir", sweep_o.out_dir, "Output directory")->required();

  PacOptions pac_o;
  auto* pac = app.add_subcommand("pac-budget", "Sample budgets for batch-estimated bounds");
  pac->add_option("--eps", pac_o.eps, "eps1 eps2 eps3 (one value applies to all)")->expected(1, 3);
  pac->add_option("--delta", pac_o.delta, "delta1 delta2 delta3 (one value applies to all)")->expected(1, 3);
  pac->add_option("--gamma", pac_o.gamma, "Discount");
  pac->add_option("--beta", pac_o.beta, "Inverse temperature");
  pac->add_option("--L-r", pac_o.L_r, "Lipschitz constant of the reward");
  pac->add_option("--L-p", pac_o.L_p, "Lipschitz constant of the transition kernel");
  pac->add_option("--L-Q", pac_o.L_Q, "Lipschitz constant of Q");
  pac->add_option("--L-kappa", pac_o.L_kappa, "Lipschitz constant of the log prior");
  pac->add_option("--L-delta", pac_o.L_delta, "Lipschitz constant of Delta (overrides the L-* inputs)");
  pac->add_option("--diam", pac_o.diam, "Diameter of the sampled region");
  pac->add_option("--dim", pac_o.dim, "State-action dimension");
  pac->add_option("--r-min", pac_o.r_min, "Smallest reward");
  pac->add_option("--r-max", pac_o.r_max, "Largest reward");
  pac->add_option("--csv", pac_o.csv, "Also write the table as CSV");

  CheckOptions check_o;
  auto* check = app.add_subcommand("check-bounds", "Check that computed bounds contain Q*");
  add_env_options(check, check_o.env);
  check->add_option("--model", check_o.model, "Model source")->check(CLI::IsMember({"maze", "random-mdp"}));
  check->add_option("--states", check_o.states, "States of a random MDP");
  check->add_option("--actions", check_o.actions, "Actions of a random MDP");
  check->add_option("--terminal-fraction", check_o.terminal_fraction, "Terminal probability of a random MDP");
  check->add_option("--gamma", check_o.gamma, "Discount");
  check->add_option("--beta", check_o.beta, "Inverse temperature");
  check->add_option("--seed", check_o.seed, "Seed of the model and the random Q tables");
  check->add_option("--q", check_o.q, "Q source")->check(CLI::IsMember({"random", "solved", "file"}));
  check->add_option("--q-file", check_o.q_file, "Q CSV (state,action,q) or bounds CSV for --q file");
  check->add_option("--trials", check_o.trials, "Random Q tables to test");
  check->add_option("--q-low", check_o.q_low, "Lower end of random Q entries");
  check->add_option("--q-high", check_o.q_high, "Upper end of random Q entries");
  check->add_option("--slack", check_o.slack, "Allowed violation");
  check->add_option("--tol", check_o.tol, "Solver tolerance for Q*");
  check->add_option("--export-bounds", check_o.export_bounds, "Write the last bounds as CSV");

  // Documentation only: expand_config consumes --config before parsing.
  for (CLI::App* cmd : app.get_subcommands({})) {
    cmd->add_option("--config", "key=value file of flag defaults; command-line flags take precedence");
  }

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    for (const CLI::App* cmd : app.get_subcommands()) log_config(err, cmd);
    if (*solve) return cmd_solve(solve_o, out, err);
    if (*train_cmd) return cmd_train(train_o, out, err);
    if (*sweep) return cmd_sweep(sweep_o, out, err);
    if (*pac) return cmd_pac_budget(pac_o, out);
    if (*check) return cmd_check_bounds(check_o, out);
  } catch (const Violation& e) {
    err << e.what() << '\n';
    return kExitViolation;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const CrossedBounds& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace softclip
