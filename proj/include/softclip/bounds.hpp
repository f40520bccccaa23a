#pragma once

// Double-sided bounds on the optimal soft Q-function computed from an
// arbitrary estimate Q, the clipped Bellman operator, and bound bookkeeping.
//
// With Delta(s,a) = r(s,a) + gamma E[(1 - d(s')) V(s')] - Q(s,a), the gap
// K = Q* - Q solves a soft Bellman equation whose reward is Delta, so
//
//   Q*(s,a) <= r(s,a) + gamma (E[(1-d) V(s')] + E[1-d] * X_hi)
//   Q*(s,a) >= r(s,a) + gamma (E[(1-d) V(s')] + E[1-d] * X_lo)
//
// where X_hi = sup Delta / (1 - gamma) and X_lo = inf Delta / (1 - gamma).
// When the model has terminal states, episodes can end before the geometric
// sum accumulates, so a negative sup (positive inf) only bounds K by the
// one-step value: X_hi = sup Delta if sup Delta < 0, and likewise for X_lo.

#include <cmath>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "softclip/mdp.hpp"

namespace softclip {

enum class Provenance { Exact, BatchEstimated };

const char* to_string(Provenance p) noexcept;

struct BoundPair {
  QTable lower;
  QTable upper;
  Provenance provenance = Provenance::Exact;

  /// (-inf, +inf) everywhere.
  static BoundPair unbounded(std::size_t n_states, std::size_t n_actions);
  /// [lo, hi] everywhere.
  static BoundPair constant(std::size_t n_states, std::size_t n_actions, double lo, double hi);

  std::size_t n_states() const noexcept { return lower.n_states(); }
  std::size_t n_actions() const noexcept { return lower.n_actions(); }

  /// lower - slack <= q <= upper + slack everywhere.
  bool contains(const QTable& q, double slack = 0.0) const;
};

/// Bellman residual Delta(s,a) for every row (terminal rows give r - Q).
using DeltaTable = QTable;

DeltaTable compute_delta(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg);

struct DeltaExtrema {
  double inf = 0.0;
  double sup = 0.0;
};

/// The X_lo / X_hi terms above.
std::pair<double, double> bracket_terms(DeltaExtrema d, double gamma, bool has_terminals);

/// Scratch buffers reused across repeated bound computations.
struct BoundWorkspace {
  std::vector<double> values;      // V(s)
  std::vector<double> next_value;  // E[(1-d) V(s')]
  std::vector<double> live_mass;   // E[1-d]
};

/// Bounds for rows whose dynamics are unknown (SparseModel::defined == 0).
struct UndefinedRowBounds {
  double lower = -INFINITY;
  double upper = INFINITY;
};

/// Theorem-style bounds from q on `model`, written into `out` (resized as
/// needed). Delta is extremized exactly over defined rows of non-terminal
/// states, whose values are the only ones ever bootstrapped; the bound
/// formula then applies to every defined row. Rows whose successors are all
/// terminal get lower = upper = r. Returns the extrema.
DeltaExtrema theorem1_bounds(const QTable& q, const SparseModel& model, const SoftConfig& cfg,
                             BoundPair& out, BoundWorkspace& ws, Exec exec = Exec::Serial,
                             UndefinedRowBounds undefined = {});

BoundPair theorem1_bounds(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg,
                          Exec exec = Exec::Serial);

/// [R_min / (1 - gamma), R_max / (1 - gamma)] over realized rewards of
/// non-terminal rows.
BoundPair baseline_bounds(const TabularMdp& mdp);

/// Interval that contains Q* even when episodes can terminate after one
/// step: [min(R_min, R_min/(1-gamma)), max(R_max, R_max/(1-gamma))].
UndefinedRowBounds termination_safe_interval(RewardRange range, double gamma);

/// Elementwise min(max(q, L), U). Throws CrossedBounds if any L > U.
QTable clip(const QTable& q, const BoundPair& b);

struct ClipStats {
  std::size_t changed = 0;  // entries moved by the clamp
  std::size_t crossed = 0;  // entries left alone because L > U there
};

/// In-place clamp that skips (and counts) crossed entries instead of throwing.
ClipStats clip_in_place(QTable& q, const BoundPair& b);

/// clip(soft_backup(q), b).
QTable clipped_backup(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg,
                      const BoundPair& b, Exec exec = Exec::Serial);

/// Elementwise intersection: max of lowers, min of uppers. Exact only if both
/// inputs are. If the intersection is empty at some entry by more than
/// `slack`, throws CrossedBounds for the first such entry; a crossing within
/// `slack` (rounding) keeps `a`'s entry there. Pass the running bounds as `a`.
BoundPair tighten(const BoundPair& a, const BoundPair& b, double slack = 0.0);

/// In-place form of tighten(running, fresh, slack). Leaves `running`
/// unchanged when it throws.
void tighten_in_place(BoundPair& running, const BoundPair& fresh, double slack = 0.0);

/// CSV with columns state,action,lower,upper,provenance.
void write_bounds_csv(std::ostream& out, const BoundPair& b);
BoundPair read_bounds_csv(std::istream& in);

}  // namespace softclip
