#include "softclip/learner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "softclip/csv.hpp"
#include "softclip/error.hpp"
#include "softclip/metrics.hpp"

namespace softclip {

namespace {

// Redraws of an evaluation point whose optimal return does not beat the
// uniform policy's before the previous normalized value is carried over.
constexpr std::size_t kEvalAttempts = 5;

double rollout(const TabularMdp& env, std::size_t start, Rng& rng, std::size_t cap,
               const std::function<std::size_t(std::size_t)>& policy) {
  std::size_t s = start;
  double total = 0.0;
  for (std::size_t t = 0; t < cap; ++t) {
    const Transition tr = sample_step(env, s, policy(s), rng);
    total += tr.reward;
    if (tr.terminated) break;
    s = tr.next_state;
  }
  return total;
}

std::vector<std::size_t> start_states(const TabularMdp& env) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < env.n_states(); ++s) {
    if (!env.terminal(s)) out.push_back(s);
  }
  if (out.empty()) throw InvalidArgument("environment has no non-terminal state");
  return out;
}

struct TableStats {
  double mean = 0.0;
  double min = INFINITY;
  double max = -INFINITY;
};

// Statistics over rows of non-terminal states.
TableStats table_stats(const QTable& t, const TabularMdp& env) {
  TableStats st;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t s = 0; s < t.n_states(); ++s) {
    if (env.terminal(s)) continue;
    for (double v : t.row(s)) {
      sum += v;
      st.min = std::min(st.min, v);
      st.max = std::max(st.max, v);
      ++n;
    }
  }
  st.mean = n ? sum / static_cast<double>(n) : NAN;
  return st;
}

std::size_t boltzmann_action(std::span<const double> q_row, double beta, Rng& rng,
                             std::vector<double>& weights) {
  const double m = *std::max_element(q_row.begin(), q_row.end());
  weights.resize(q_row.size());
  for (std::size_t a = 0; a < q_row.size(); ++a) weights[a] = std::exp(beta * (q_row[a] - m));
  return rng.categorical(weights);
}

}  // namespace

std::string_view to_string(ClipMode m) noexcept {
  switch (m) {
    case ClipMode::None:
      return "none";
    case ClipMode::Baseline:
      return "baseline";
    case ClipMode::AlwaysClip:
      return "always-clip";
    case ClipMode::ConditionalTD:
      return "conditional-td";
  }
  return "?";
}

std::string_view to_string(ModelMode m) noexcept {
  return m == ModelMode::Given ? "given" : "learned";
}

ClipMode parse_clip_mode(std::string_view text) {
  for (ClipMode m : {ClipMode::None, ClipMode::Baseline, ClipMode::AlwaysClip, ClipMode::ConditionalTD}) {
    if (text == to_string(m)) return m;
  }
  throw InvalidArgument("unknown clip mode '" + std::string(text) + "'");
}

ModelMode parse_model_mode(std::string_view text) {
  if (text == "given") return ModelMode::Given;
  if (text == "learned") return ModelMode::Learned;
  throw InvalidArgument("unknown model mode '" + std::string(text) + "'");
}

void LearnerConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must be in [0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must be in [0, 1)");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
  if (!(q_init_low <= q_init_high) || !std::isfinite(q_init_low) || !std::isfinite(q_init_high)) {
    throw InvalidArgument("bad Q initialization range");
  }
  if (max_env_steps == 0 || eval_every == 0 || episode_cap == 0 || eval_episodes == 0 ||
      recompute_every == 0) {
    throw InvalidArgument("step counts must be positive");
  }
  if (!(tighten_slack >= 0.0)) throw InvalidArgument("tighten_slack must be nonnegative");
}

LearnedModel::LearnedModel(std::size_t n_states, std::size_t n_actions, double gamma)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      rows_(n_states * n_actions),
      total_(n_states * n_actions, 0),
      reward_sum_(n_states * n_actions, 0.0),
      terminal_(n_states, 0) {}

void LearnedModel::update(std::size_t s, std::size_t a, const Transition& tr) {
  if (s >= n_states_ || a >= n_actions_ || tr.next_state >= n_states_) {
    throw InvalidArgument("LearnedModel::update: index out of range");
  }
  const std::size_t k = s * n_actions_ + a;
  auto& row = rows_[k];
  auto it = std::find_if(row.begin(), row.end(),
                         [&](const Entry& e) { return e.state == tr.next_state; });
  if (it == row.end()) {
    row.push_back({static_cast<std::uint32_t>(tr.next_state), 0, 0.0});
    it = row.end() - 1;
  }
  ++it->count;
  it->reward_sum += tr.reward;
  ++total_[k];
  reward_sum_[k] += tr.reward;
  if (tr.terminated) terminal_[tr.next_state] = 1;
}

std::uint64_t LearnedModel::count(std::size_t s, std::size_t a, std::size_t next) const {
  for (const Entry& e : rows_[s * n_actions_ + a]) {
    if (e.state == next) return e.count;
  }
  return 0;
}

double LearnedModel::reward(std::size_t s, std::size_t a) const {
  const std::size_t k = s * n_actions_ + a;
  return total_[k] ? reward_sum_[k] / static_cast<double>(total_[k]) : NAN;
}

std::vector<double> LearnedModel::empirical_row(std::size_t s, std::size_t a) const {
  std::vector<double> row(n_states_, 0.0);
  const std::size_t k = s * n_actions_ + a;
  if (!total_[k]) return row;
  for (const Entry& e : rows_[k]) {
    row[e.state] = static_cast<double>(e.count) / static_cast<double>(total_[k]);
  }
  return row;
}

void LearnedModel::to_sparse(SparseModel& out) const {
  const std::size_t rows = n_states_ * n_actions_;
  out.n_states = n_states_;
  out.n_actions = n_actions_;
  out.gamma = gamma_;
  out.terminal = terminal_;
  out.reward.resize(rows);
  out.defined.resize(rows);
  out.row_begin.resize(rows + 1);
  out.successors.clear();
  out.row_begin[0] = 0;
  for (std::size_t k = 0; k < rows; ++k) {
    const double total = static_cast<double>(total_[k]);
    out.defined[k] = total_[k] ? 1 : 0;
    out.reward[k] = total_[k] ? reward_sum_[k] / total : 0.0;
    for (const Entry& e : rows_[k]) {
      out.successors.push_back({e.state, static_cast<double>(e.count) / total,
                                e.reward_sum / static_cast<double>(e.count),
                                terminal_[e.state] ? 0.0 : 1.0});
    }
    out.row_begin[k + 1] = out.successors.size();
  }
}

void update_learned_model(LearnedModel& model, std::size_t s, std::size_t a, const Transition& tr) {
  model.update(s, a, tr);
}

double td_update(QTable& q, std::size_t s, std::size_t a, const Transition& tr,
                 const LearnerConfig& cfg, const SoftConfig& soft) {
  const double next_v =
      tr.terminated ? 0.0
                    : soft_value(q.row(tr.next_state), soft.prior_row(tr.next_state), soft.beta);
  const double delta = tr.reward + cfg.gamma * next_v - q(s, a);
  q(s, a) += cfg.alpha * delta;
  return q(s, a);
}

EvalResult evaluate(const TabularMdp& env, const QTable& q, const QTable& q_star,
                    const LearnerConfig& cfg, std::size_t point) {
  const auto starts = start_states(env);
  const std::size_t n_a = env.n_actions();
  EvalResult res;
  for (std::size_t attempt = 0; attempt < kEvalAttempts; ++attempt) {
    double agent = 0.0;
    double optimal = 0.0;
    double uniform = 0.0;
    for (std::size_t ep = 0; ep < cfg.eval_episodes; ++ep) {
      const std::size_t key = attempt * cfg.eval_episodes + ep;
      Rng noise(cfg.seed, "eval", point, key);
      const std::size_t start = starts[noise.below(starts.size())];
      Rng noise_agent = noise;
      Rng noise_opt = noise;
      Rng noise_uni = noise;
      Rng actions(cfg.seed, "eval-uniform", point, key);
      agent += rollout(env, start, noise_agent, cfg.episode_cap,
                       [&](std::size_t s) { return greedy_action(q.row(s)); });
      optimal += rollout(env, start, noise_opt, cfg.episode_cap,
                         [&](std::size_t s) { return greedy_action(q_star.row(s)); });
      uniform += rollout(env, start, noise_uni, cfg.episode_cap,
                         [&](std::size_t) { return static_cast<std::size_t>(actions.below(n_a)); });
    }
    const double n = static_cast<double>(cfg.eval_episodes);
    res.agent = agent / n;
    res.optimal = optimal / n;
    res.uniform = uniform / n;
    res.resamples = attempt;
    if (res.optimal > res.uniform) return res;
  }
  res.degenerate = true;
  return res;
}

LearningCurve train(const TabularMdp& env, const LearnerConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  if (cfg.gamma != env.gamma()) throw InvalidArgument("learner gamma differs from the environment's");
  const std::size_t n_s = env.n_states();
  const std::size_t n_a = env.n_actions();
  const SoftConfig soft = SoftConfig::uniform(n_s, n_a, cfg.beta);

  QTable solved;
  const QTable* q_star = opts.q_star;
  if (q_star == nullptr) {
    solved = solve_soft(env, soft, 1e-10).q;
    q_star = &solved;
  } else if (q_star->n_states() != n_s || q_star->n_actions() != n_a) {
    throw InvalidArgument("q_star shape does not match the environment");
  }

  QTable q(n_s, n_a);
  {
    Rng init(cfg.seed, "init");
    for (double& v : q.values()) v = init.uniform(cfg.q_init_low, cfg.q_init_high);
  }
  Rng rng(cfg.seed, "env");
  const auto starts = start_states(env);

  const bool learned = cfg.model_mode == ModelMode::Learned;
  LearnedModel model(learned ? n_s : 0, learned ? n_a : 0, env.gamma());
  SparseModel learned_sparse;
  const UndefinedRowBounds fallback = termination_safe_interval(env.reward_range(), env.gamma());

  BoundPair running = BoundPair::unbounded(n_s, n_a);
  BoundPair fresh;
  BoundWorkspace ws;
  if (cfg.clip_mode == ClipMode::Baseline && !opts.force_unbounded) running = baseline_bounds(env);

  LearningCurve curve;
  auto refresh_bounds = [&](const QTable& from) {
    if (opts.force_unbounded) return;
    if (!learned) {
      theorem1_bounds(from, env.sparse(), soft, fresh, ws, Exec::Serial);
      try {
        tighten_in_place(running, fresh, cfg.tighten_slack);
      } catch (const CrossedBounds&) {
        ++curve.tighten_failures;
        running = fresh;
      }
    } else {
      model.to_sparse(learned_sparse);
      theorem1_bounds(from, learned_sparse, soft, running, ws, Exec::Serial, fallback);
    }
  };

  std::size_t interval_clips = 0;
  std::size_t point = 0;
  BoundPair log_bounds;
  auto log_point = [&](std::size_t step) {
    const EvalResult ev = evaluate(env, q, *q_star, cfg, point);
    curve.eval_resamples += ev.resamples;
    double norm;
    if (!ev.degenerate) {
      norm = normalized_reward(ev.agent, ev.optimal, ev.uniform);
    } else {
      norm = curve.eval_reward_normalized.empty() ? 0.0 : curve.eval_reward_normalized.back();
      ++curve.eval_carried;
    }
    const BoundPair* shown = &running;
    if (cfg.clip_mode == ClipMode::None) {
      theorem1_bounds(q, env.sparse(), soft, log_bounds, ws, Exec::Serial);
      shown = &log_bounds;
    }
    const TableStats qs = table_stats(q, env);
    const TableStats lo = table_stats(shown->lower, env);
    const TableStats hi = table_stats(shown->upper, env);
    curve.env_steps.push_back(static_cast<double>(step));
    curve.eval_reward.push_back(ev.agent);
    curve.eval_reward_normalized.push_back(norm);
    curve.printed_ratio.push_back(printed_ratio(ev.agent, ev.optimal, ev.uniform));
    curve.q_mean.push_back(qs.mean);
    curve.q_min.push_back(qs.min);
    curve.q_max.push_back(qs.max);
    curve.lower_mean.push_back(lo.mean);
    curve.upper_mean.push_back(hi.mean);
    curve.lower_min.push_back(lo.min);
    curve.upper_max.push_back(hi.max);
    curve.clip_events.push_back(static_cast<double>(interval_clips));
    interval_clips = 0;
    ++point;
  };

  log_point(0);
  std::vector<double> weights;
  std::size_t s = starts[rng.below(starts.size())];
  std::size_t episode_len = 0;
  for (std::size_t t = 1; t <= cfg.max_env_steps; ++t) {
    const std::size_t a = boltzmann_action(q.row(s), cfg.beta, rng, weights);
    const Transition tr = sample_step(env, s, a, rng);
    if (learned) model.update(s, a, tr);
    const bool refresh = (t - 1) % cfg.recompute_every == 0;

    ClipStats stats;
    switch (cfg.clip_mode) {
      case ClipMode::None:
        td_update(q, s, a, tr, cfg, soft);
        break;
      case ClipMode::Baseline:
        td_update(q, s, a, tr, cfg, soft);
        stats = clip_in_place(q, running);
        break;
      case ClipMode::AlwaysClip:
        td_update(q, s, a, tr, cfg, soft);
        if (refresh) refresh_bounds(q);
        stats = clip_in_place(q, running);
        break;
      case ClipMode::ConditionalTD:
        if (refresh) refresh_bounds(q);
        stats = clip_in_place(q, running);
        if (stats.changed == 0) td_update(q, s, a, tr, cfg, soft);
        break;
    }
    interval_clips += stats.changed;
    curve.crossed_entries += stats.crossed;

    if (opts.observer) {
      opts.observer({t, s, a, tr, q, cfg.clip_mode == ClipMode::None ? nullptr : &running});
    }

    ++episode_len;
    if (tr.terminated || episode_len >= cfg.episode_cap) {
      s = starts[rng.below(starts.size())];
      episode_len = 0;
    } else {
      s = tr.next_state;
    }
    if (t % cfg.eval_every == 0 || t == cfg.max_env_steps) log_point(t);
  }
  curve.final_q = std::move(q);
  return curve;
}

LearningCurve run_always_clip(const TabularMdp& env, LearnerConfig cfg, const TrainOptions& opts) {
  cfg.clip_mode = ClipMode::AlwaysClip;
  return train(env, cfg, opts);
}

LearningCurve run_conditional_td(const TabularMdp& env, LearnerConfig cfg,
                                 const TrainOptions& opts) {
  cfg.clip_mode = ClipMode::ConditionalTD;
  return train(env, cfg, opts);
}

void write_curve_csv(std::ostream& out, const LearningCurve& c) {
  out << "env_steps,eval_reward,eval_reward_normalized,q_mean,q_min,q_max,lower_mean,upper_mean,"
         "clip_events\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    write_csv_row(out, {std::to_string(static_cast<std::uint64_t>(c.env_steps[i])),
                        format_double(c.eval_reward[i]), format_double(c.eval_reward_normalized[i]),
                        format_double(c.q_mean[i]), format_double(c.q_min[i]),
                        format_double(c.q_max[i]), format_double(c.lower_mean[i]),
                        format_double(c.upper_mean[i]),
                        std::to_string(static_cast<std::uint64_t>(c.clip_events[i]))});
  }
}

LearningCurve read_curve_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t cols[9] = {t.column("env_steps"),  t.column("eval_reward"),
                               t.column("eval_reward_normalized"),
                               t.column("q_mean"),     t.column("q_min"),
                               t.column("q_max"),      t.column("lower_mean"),
                               t.column("upper_mean"), t.column("clip_events")};
  std::vector<double>* dest[9];
  LearningCurve c;
  dest[0] = &c.env_steps;
  dest[1] = &c.eval_reward;
  dest[2] = &c.eval_reward_normalized;
  dest[3] = &c.q_mean;
  dest[4] = &c.q_min;
  dest[5] = &c.q_max;
  dest[6] = &c.lower_mean;
  dest[7] = &c.upper_mean;
  dest[8] = &c.clip_events;
  for (const auto& row : t.rows) {
    for (int i = 0; i < 9; ++i) dest[i]->push_back(parse_double(row[cols[i]]));
  }
  return c;
}

}  // namespace softclip
