#include "softclip/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "softclip/error.hpp"

namespace softclip::kernels {

namespace {

// Below this many rows a parallel region costs more than it saves.
constexpr std::ptrdiff_t kParallelMinRows = 256;

bool go_parallel(Exec exec, std::ptrdiff_t rows) {
  return exec == Exec::Parallel && rows >= kParallelMinRows;
}

}  // namespace

void state_values(const QTable& q, const SoftConfig& cfg, std::span<double> values, Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(q.n_states());
  if (values.size() != q.n_states()) throw InvalidArgument("state_values: output size mismatch");
  bool bad = false;
#pragma omp parallel for schedule(static) if (go_parallel(exec, n)) reduction(|| : bad)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto row = q.row(static_cast<std::size_t>(s));
    const auto prior = cfg.prior_row(static_cast<std::size_t>(s));
    double m = -INFINITY;
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (!std::isfinite(row[a])) bad = true;
      if (prior[a] > 0.0) m = std::max(m, row[a]);
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (prior[a] > 0.0) acc += prior[a] * std::exp(cfg.beta * (row[a] - m));
    }
    values[static_cast<std::size_t>(s)] = m + std::log(acc) / cfg.beta;
  }
  if (bad) throw NumericalError("non-finite Q entry");
}

void expected_next(const SparseModel& model, std::span<const double> values,
                   std::span<double> next_value, std::span<double> live_mass, Exec exec) {
  const auto rows = static_cast<std::ptrdiff_t>(model.n_states * model.n_actions);
  if (values.size() != model.n_states || next_value.size() != static_cast<std::size_t>(rows) ||
      live_mass.size() != static_cast<std::size_t>(rows)) {
    throw InvalidArgument("expected_next: size mismatch");
  }
#pragma omp parallel for schedule(static) if (go_parallel(exec, rows))
  for (std::ptrdiff_t k = 0; k < rows; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    double ev = 0.0;
    double mass = 0.0;
    if (model.defined[ku]) {
      for (std::size_t j = model.row_begin[ku]; j < model.row_begin[ku + 1]; ++j) {
        const Successor& nx = model.successors[j];
        const double w = nx.prob * nx.live;
        ev += w * values[nx.state];
        mass += w;
      }
    }
    next_value[ku] = ev;
    live_mass[ku] = mass;
  }
}

void backup_from(const SparseModel& model, std::span<const double> next_value,
                 std::span<double> out, Exec exec) {
  const auto rows = static_cast<std::ptrdiff_t>(model.reward.size());
  if (next_value.size() != model.reward.size() || out.size() != model.reward.size()) {
    throw InvalidArgument("backup_from: size mismatch");
  }
  const double gamma = model.gamma;
#pragma omp parallel for schedule(static) if (go_parallel(exec, rows))
  for (std::ptrdiff_t k = 0; k < rows; ++k) {
    out[static_cast<std::size_t>(k)] =
        model.reward[static_cast<std::size_t>(k)] + gamma * next_value[static_cast<std::size_t>(k)];
  }
}

double sup_distance(std::span<const double> a, std::span<const double> b, Exec exec) {
  if (a.size() != b.size()) throw InvalidArgument("sup_distance: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  double worst = 0.0;
#pragma omp parallel for schedule(static) if (go_parallel(exec, n)) reduction(max : worst)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    worst = std::max(worst, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
  }
  return worst;
}

namespace reference {

void state_values(const QTable& q, const SoftConfig& cfg, std::span<double> values) {
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    values[s] = soft_value(q.row(s), cfg.prior_row(s), cfg.beta);
  }
}

void expected_next(const TabularMdp& mdp, std::span<const double> values,
                   std::span<double> next_value, std::span<double> live_mass) {
  const std::size_t n_s = mdp.n_states();
  for (std::size_t s = 0; s < n_s; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const auto p = mdp.transition_row(s, a);
      double ev = 0.0;
      double mass = 0.0;
      for (std::size_t s2 = 0; s2 < n_s; ++s2) {
        if (mdp.terminal(s2)) continue;
        ev += p[s2] * values[s2];
        mass += p[s2];
      }
      next_value[s * mdp.n_actions() + a] = ev;
      live_mass[s * mdp.n_actions() + a] = mass;
    }
  }
}

QTable soft_backup(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg) {
  std::vector<double> v(mdp.n_states());
  std::vector<double> ev(q.size());
  std::vector<double> mass(q.size());
  state_values(q, cfg, v);
  expected_next(mdp, v, ev, mass);
  QTable out(q.n_states(), q.n_actions());
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    for (std::size_t a = 0; a < q.n_actions(); ++a) {
      out(s, a) = mdp.reward(s, a) + mdp.gamma() * ev[s * q.n_actions() + a];
    }
  }
  return out;
}

}  // namespace reference

}  // namespace softclip::kernels
