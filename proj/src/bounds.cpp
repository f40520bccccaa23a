#include "softclip/bounds.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "softclip/csv.hpp"
#include "softclip/error.hpp"
#include "softclip/kernels.hpp"

namespace softclip {

namespace {

void check_shape(const QTable& q, std::size_t n_states, std::size_t n_actions, const char* what) {
  if (q.n_states() != n_states || q.n_actions() != n_actions) {
    throw InvalidArgument(std::string(what) + ": shape mismatch");
  }
}

void check_same(const BoundPair& b, const QTable& q, const char* what) {
  if (!b.lower.same_shape(q) || !b.upper.same_shape(q)) {
    throw InvalidArgument(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

const char* to_string(Provenance p) noexcept {
  return p == Provenance::Exact ? "exact" : "batch_estimated";
}

BoundPair BoundPair::unbounded(std::size_t n_states, std::size_t n_actions) {
  return constant(n_states, n_actions, -INFINITY, INFINITY);
}

BoundPair BoundPair::constant(std::size_t n_states, std::size_t n_actions, double lo, double hi) {
  return {QTable(n_states, n_actions, lo), QTable(n_states, n_actions, hi), Provenance::Exact};
}

bool BoundPair::contains(const QTable& q, double slack) const {
  check_same(*this, q, "contains");
  const auto lo = lower.values();
  const auto hi = upper.values();
  const auto v = q.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] >= lo[k] - slack && v[k] <= hi[k] + slack)) return false;
  }
  return true;
}

DeltaTable compute_delta(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg) {
  check_shape(q, mdp.n_states(), mdp.n_actions(), "compute_delta");
  DeltaTable delta = soft_backup(q, mdp, cfg);
  auto d = delta.values();
  const auto qv = q.values();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] -= qv[k];
  return delta;
}

std::pair<double, double> bracket_terms(DeltaExtrema d, double gamma, bool has_terminals) {
  const double horizon = 1.0 / (1.0 - gamma);
  if (!has_terminals) return {d.inf * horizon, d.sup * horizon};
  return {d.inf <= 0.0 ? d.inf * horizon : d.inf, d.sup >= 0.0 ? d.sup * horizon : d.sup};
}

DeltaExtrema theorem1_bounds(const QTable& q, const SparseModel& model, const SoftConfig& cfg,
                             BoundPair& out, BoundWorkspace& ws, Exec exec,
                             UndefinedRowBounds undefined) {
  const std::size_t n_s = model.n_states;
  const std::size_t n_a = model.n_actions;
  check_shape(q, n_s, n_a, "theorem1_bounds");
  if (cfg.prior.size() != q.size()) throw InvalidArgument("theorem1_bounds: prior shape mismatch");
  const std::size_t rows = n_s * n_a;
  ws.values.resize(n_s);
  ws.next_value.resize(rows);
  ws.live_mass.resize(rows);
  if (!out.lower.same_shape(q)) out.lower = QTable(n_s, n_a);
  if (!out.upper.same_shape(q)) out.upper = QTable(n_s, n_a);
  out.provenance = Provenance::Exact;

  kernels::state_values(q, cfg, ws.values, exec);
  kernels::expected_next(model, ws.values, ws.next_value, ws.live_mass, exec);

  const double gamma = model.gamma;
  const auto qv = q.values();
  DeltaExtrema ext{INFINITY, -INFINITY};
  for (std::size_t s = 0; s < n_s; ++s) {
    if (model.terminal[s]) continue;
    for (std::size_t k = s * n_a; k < (s + 1) * n_a; ++k) {
      if (!model.defined[k]) continue;
      const double delta = model.reward[k] + gamma * ws.next_value[k] - qv[k];
      ext.inf = std::min(ext.inf, delta);
      ext.sup = std::max(ext.sup, delta);
    }
  }

  auto lo = out.lower.values();
  auto hi = out.upper.values();
  const bool any = ext.inf <= ext.sup;
  const auto [x_lo, x_hi] = any ? bracket_terms(ext, gamma, model.has_terminals())
                                : std::pair<double, double>{-INFINITY, INFINITY};
  for (std::size_t k = 0; k < rows; ++k) {
    const double base = model.reward[k] + gamma * ws.next_value[k];
    if (!model.defined[k]) {
      lo[k] = undefined.lower;
      hi[k] = undefined.upper;
    } else if (ws.live_mass[k] == 0.0) {
      lo[k] = hi[k] = base;
    } else if (!any) {
      // No decision rows to extrapolate the successors' values from.
      lo[k] = undefined.lower;
      hi[k] = undefined.upper;
    } else {
      lo[k] = base + gamma * ws.live_mass[k] * x_lo;
      hi[k] = base + gamma * ws.live_mass[k] * x_hi;
    }
  }
  return ext;
}

BoundPair theorem1_bounds(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg,
                          Exec exec) {
  BoundPair out;
  BoundWorkspace ws;
  theorem1_bounds(q, mdp.sparse(), cfg, out, ws, exec);
  return out;
}

BoundPair baseline_bounds(const TabularMdp& mdp) {
  const RewardRange r = mdp.reward_range();
  const double horizon = 1.0 / (1.0 - mdp.gamma());
  return BoundPair::constant(mdp.n_states(), mdp.n_actions(), r.min * horizon, r.max * horizon);
}

UndefinedRowBounds termination_safe_interval(RewardRange range, double gamma) {
  const double horizon = 1.0 / (1.0 - gamma);
  return {std::min(range.min, range.min * horizon), std::max(range.max, range.max * horizon)};
}

QTable clip(const QTable& q, const BoundPair& b) {
  check_same(b, q, "clip");
  const auto lo = b.lower.values();
  const auto hi = b.upper.values();
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (lo[k] > hi[k]) throw CrossedBounds(k / q.n_actions(), k % q.n_actions(), lo[k], hi[k]);
  }
  QTable out = q;
  auto v = out.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::min(std::max(v[k], lo[k]), hi[k]);
  return out;
}

ClipStats clip_in_place(QTable& q, const BoundPair& b) {
  check_same(b, q, "clip_in_place");
  const auto lo = b.lower.values();
  const auto hi = b.upper.values();
  auto v = q.values();
  ClipStats stats;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (lo[k] > hi[k]) {
      ++stats.crossed;
      continue;
    }
    const double c = std::min(std::max(v[k], lo[k]), hi[k]);
    if (c != v[k]) {
      v[k] = c;
      ++stats.changed;
    }
  }
  return stats;
}

QTable clipped_backup(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg,
                      const BoundPair& b, Exec exec) {
  return clip(soft_backup(q, mdp, cfg, exec), b);
}

BoundPair tighten(const BoundPair& a, const BoundPair& b, double slack) {
  BoundPair out = a;
  tighten_in_place(out, b, slack);
  return out;
}

void tighten_in_place(BoundPair& running, const BoundPair& fresh, double slack) {
  check_same(running, fresh.lower, "tighten");
  check_same(fresh, running.lower, "tighten");
  auto lo = running.lower.values();
  auto hi = running.upper.values();
  const auto flo = fresh.lower.values();
  const auto fhi = fresh.upper.values();
  const std::size_t n_a = running.n_actions();
  for (std::size_t k = 0; k < lo.size(); ++k) {
    const double l = std::max(lo[k], flo[k]);
    const double u = std::min(hi[k], fhi[k]);
    if (l > u + slack) throw CrossedBounds(k / n_a, k % n_a, l, u);
  }
  for (std::size_t k = 0; k < lo.size(); ++k) {
    const double l = std::max(lo[k], flo[k]);
    const double u = std::min(hi[k], fhi[k]);
    if (l > u) continue;
    lo[k] = l;
    hi[k] = u;
  }
  if (fresh.provenance != Provenance::Exact) running.provenance = Provenance::BatchEstimated;
}

void write_bounds_csv(std::ostream& out, const BoundPair& b) {
  out << "state,action,lower,upper,provenance\n";
  const char* prov = to_string(b.provenance);
  for (std::size_t s = 0; s < b.n_states(); ++s) {
    for (std::size_t a = 0; a < b.n_actions(); ++a) {
      out << s << ',' << a << ',' << format_double(b.lower(s, a)) << ','
          << format_double(b.upper(s, a)) << ',' << prov << '\n';
    }
  }
}

BoundPair read_bounds_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t cs = t.column("state");
  const std::size_t ca = t.column("action");
  const std::size_t cl = t.column("lower");
  const std::size_t cu = t.column("upper");
  const std::size_t cp = t.column("provenance");
  if (t.rows.empty()) throw FormatError("bounds CSV has no rows");
  std::size_t n_s = 0;
  std::size_t n_a = 0;
  for (const auto& row : t.rows) {
    n_s = std::max<std::size_t>(n_s, parse_u64(row[cs]) + 1);
    n_a = std::max<std::size_t>(n_a, parse_u64(row[ca]) + 1);
  }
  if (t.rows.size() != n_s * n_a) throw FormatError("bounds CSV must list every (state, action)");
  BoundPair b{QTable(n_s, n_a, NAN), QTable(n_s, n_a, NAN), Provenance::Exact};
  for (const auto& row : t.rows) {
    const auto s = parse_u64(row[cs]);
    const auto a = parse_u64(row[ca]);
    if (!std::isnan(b.lower(s, a))) throw FormatError("bounds CSV repeats an entry");
    b.lower(s, a) = parse_double(row[cl]);
    b.upper(s, a) = parse_double(row[cu]);
    if (row[cp] == "batch_estimated") {
      b.provenance = Provenance::BatchEstimated;
    } else if (row[cp] != "exact") {
      throw FormatError("unknown provenance '" + row[cp] + "'");
    }
  }
  return b;
}

}  // namespace softclip
