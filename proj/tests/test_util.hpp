#pragma once

// Small MDP builders and independent oracles shared by the unit tests. The
// oracles use plain dense loops in long double and none of the library's
// kernels.

#include <cmath>
#include <vector>

#include "softclip/mdp.hpp"

namespace softclip::testing {

/// One state, one action, self-loop with reward r.
inline TabularMdp self_loop(double r, double gamma) {
  return TabularMdp(1, 1, gamma, {r}, {1.0}, {0});
}

/// s0 -> s1 deterministically with reward 0; s1 is terminal with reward 1 on
/// a self-loop. One action.
inline TabularMdp two_state_chain(double gamma) {
  return TabularMdp(2, 1, gamma, {0.0, 1.0}, {0.0, 1.0, 0.0, 1.0}, {0, 1});
}

/// Soft value by direct summation (no max shift), for moderate beta*q.
inline long double naive_soft_value(const std::vector<double>& q, const std::vector<double>& prior,
                                    double beta) {
  long double acc = 0.0L;
  for (std::size_t a = 0; a < q.size(); ++a) {
    acc += static_cast<long double>(prior[a]) * std::exp(static_cast<long double>(beta) * q[a]);
  }
  return std::log(acc) / beta;
}

/// Dense soft backup over full transition rows with uniform prior.
inline std::vector<long double> naive_backup(const TabularMdp& mdp, const std::vector<long double>& q,
                                             double beta) {
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_actions();
  std::vector<long double> v(S);
  for (std::size_t s = 0; s < S; ++s) {
    long double m = q[s * A];
    for (std::size_t a = 1; a < A; ++a) m = std::max(m, q[s * A + a]);
    long double acc = 0.0L;
    for (std::size_t a = 0; a < A; ++a) acc += std::exp(beta * (q[s * A + a] - m)) / A;
    v[s] = m + std::log(acc) / beta;
  }
  std::vector<long double> out(S * A);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      long double ev = 0.0L;
      const auto row = mdp.transition_row(s, a);
      for (std::size_t n = 0; n < S; ++n) {
        if (!mdp.terminal(n)) ev += row[n] * v[n];
      }
      out[s * A + a] = mdp.reward(s, a) + mdp.gamma() * ev;
    }
  }
  return out;
}

/// Finite-horizon soft value iteration: `horizon` backups from Q = 0.
inline std::vector<long double> truncated_soft_q(const TabularMdp& mdp, double beta, int horizon) {
  std::vector<long double> q(mdp.n_states() * mdp.n_actions(), 0.0L);
  for (int t = 0; t < horizon; ++t) q = naive_backup(mdp, q, beta);
  return q;
}

inline QTable random_q(std::size_t n_states, std::size_t n_actions, Rng& rng, double lo = -1.0,
                       double hi = 1.0) {
  QTable q(n_states, n_actions);
  for (double& x : q.values()) x = rng.uniform(lo, hi);
  return q;
}

}  // namespace softclip::testing
