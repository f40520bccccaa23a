#pragma once

// Plain-text MDP format.
//
//   # comment lines start with '#'
//   <states> <actions> <gamma>
//   terminal <id> <id> ...            (optional; omitted when none)
//   <s> <a> <reward> <p_0> ... <p_{S-1}> [| <r_0> ... <r_{S-1}>]
//
// One data line per (s, a) in row-major order. The optional block after '|'
// gives outcome rewards r(s, a, s'); when present the reward column is
// informational and the expected reward is recomputed from the outcomes.
// Numbers are written in shortest round-trip form, so write/read is exact.

#include <iosfwd>
#include <string>

#include "softclip/mdp.hpp"

namespace softclip {

void write_mdp(std::ostream& out, const TabularMdp& mdp);
TabularMdp read_mdp(std::istream& in);

void save_mdp(const std::string& path, const TabularMdp& mdp);
TabularMdp load_mdp(const std::string& path);

/// Q-table CSV with columns state,action,q; every entry exactly once.
void write_q_csv(std::ostream& out, const QTable& q);
QTable read_q_csv(std::istream& in);

}  // namespace softclip
