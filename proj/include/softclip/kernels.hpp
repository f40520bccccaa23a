#pragma once

// Data-parallel inner loops shared by the solver, the bound computations and
// the learners. The CSR kernels take an Exec policy and are OpenMP-parallel
// over (s, a) rows when asked; `reference` keeps straightforward dense serial
// versions that the tests and the benchmark compare against.

#include <span>

#include "softclip/mdp.hpp"

namespace softclip::kernels {

/// V(s) = soft_value(q.row(s), prior.row(s), beta) for every state.
void state_values(const QTable& q, const SoftConfig& cfg, std::span<double> values, Exec exec);

/// For every (s, a):
///   next_value(s,a) = sum_s' p(s'|s,a) (1 - terminal(s')) V(s')
///   live_mass(s,a)  = sum_s' p(s'|s,a) (1 - terminal(s'))
/// Rows that are not `defined` get zeros.
void expected_next(const SparseModel& model, std::span<const double> values,
                   std::span<double> next_value, std::span<double> live_mass, Exec exec);

/// out(s,a) = r(s,a) + gamma * next_value(s,a).
void backup_from(const SparseModel& model, std::span<const double> next_value,
                 std::span<double> out, Exec exec);

/// max |a_i - b_i|.
double sup_distance(std::span<const double> a, std::span<const double> b, Exec exec);

namespace reference {

void state_values(const QTable& q, const SoftConfig& cfg, std::span<double> values);

/// Dense O(|S|^2 |A|) loop over full transition rows.
void expected_next(const TabularMdp& mdp, std::span<const double> values,
                   std::span<double> next_value, std::span<double> live_mass);

QTable soft_backup(const QTable& q, const TabularMdp& mdp, const SoftConfig& cfg);

}  // namespace reference

}  // namespace softclip::kernels
