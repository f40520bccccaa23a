#include "softclip/mdp_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "softclip/csv.hpp"
#include "softclip/error.hpp"

namespace softclip {

void write_mdp(std::ostream& out, const TabularMdp& mdp) {
  const std::size_t n_s = mdp.n_states();
  out << n_s << ' ' << mdp.n_actions() << ' ' << format_double(mdp.gamma()) << '\n';
  if (mdp.has_terminals()) {
    out << "terminal";
    for (std::size_t s = 0; s < n_s; ++s) {
      if (mdp.terminal(s)) out << ' ' << s;
    }
    out << '\n';
  }
  for (std::size_t s = 0; s < n_s; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      out << s << ' ' << a << ' ' << format_double(mdp.reward(s, a));
      for (double p : mdp.transition_row(s, a)) out << ' ' << format_double(p);
      if (mdp.has_outcome_rewards()) {
        out << " |";
        for (std::size_t s2 = 0; s2 < n_s; ++s2) {
          out << ' ' << format_double(mdp.outcome_reward(s, a, s2));
        }
      }
      out << '\n';
    }
  }
}

TabularMdp read_mdp(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("mdp line " + std::to_string(line_no) + ": " + what);
  };

  if (!next_line()) throw FormatError("mdp: missing header");
  auto head = split(line, ' ');
  if (head.size() != 3) throw fail("header must be 'states actions gamma'");
  const std::size_t n_s = parse_u64(head[0]);
  const std::size_t n_a = parse_u64(head[1]);
  const double gamma = parse_double(head[2]);
  if (n_s == 0 || n_a == 0) throw fail("states and actions must be positive");

  std::vector<char> terminal(n_s, 0);
  std::vector<double> reward(n_s * n_a);
  std::vector<double> transition(n_s * n_a * n_s);
  std::vector<double> outcome;
  bool first_row = true;
  bool with_outcomes = false;

  for (std::size_t k = 0; k < n_s * n_a; ++k) {
    if (!next_line()) throw FormatError("mdp: expected " + std::to_string(n_s * n_a) + " rows");
    auto fields = split(line, ' ');
    if (first_row && !fields.empty() && fields[0] == "terminal") {
      for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto id = parse_u64(fields[i]);
        if (id >= n_s) throw fail("terminal id out of range");
        terminal[id] = 1;
      }
      if (!next_line()) throw FormatError("mdp: missing rows");
      fields = split(line, ' ');
    }
    if (first_row) {
      with_outcomes = fields.size() == 4 + 2 * n_s && fields[3 + n_s] == "|";
      if (with_outcomes) outcome.resize(n_s * n_a * n_s);
      first_row = false;
    }
    const std::size_t expected = with_outcomes ? 4 + 2 * n_s : 3 + n_s;
    if (fields.size() != expected) throw fail("wrong number of fields");
    if (parse_u64(fields[0]) != k / n_a || parse_u64(fields[1]) != k % n_a) {
      throw fail("rows must be listed in (state, action) order");
    }
    reward[k] = parse_double(fields[2]);
    for (std::size_t s2 = 0; s2 < n_s; ++s2) transition[k * n_s + s2] = parse_double(fields[3 + s2]);
    if (with_outcomes) {
      if (fields[3 + n_s] != "|") throw fail("expected '|' before outcome rewards");
      for (std::size_t s2 = 0; s2 < n_s; ++s2) {
        outcome[k * n_s + s2] = parse_double(fields[4 + n_s + s2]);
      }
    }
  }
  if (next_line()) throw fail("trailing data");

  try {
    if (with_outcomes) {
      return TabularMdp(n_s, n_a, gamma, {}, std::move(transition), std::move(terminal),
                        std::move(outcome));
    }
    return TabularMdp(n_s, n_a, gamma, std::move(reward), std::move(transition),
                      std::move(terminal));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("mdp: ") + e.what());
  }
}

void save_mdp(const std::string& path, const TabularMdp& mdp) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  write_mdp(out, mdp);
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  return read_mdp(in);
}

void write_q_csv(std::ostream& out, const QTable& q) {
  write_csv_row(out, {"state", "action", "q"});
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    for (std::size_t a = 0; a < q.n_actions(); ++a) {
      write_csv_row(out, {std::to_string(s), std::to_string(a), format_double(q(s, a))});
    }
  }
}

QTable read_q_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t cs = t.column("state");
  const std::size_t ca = t.column("action");
  const std::size_t cq = t.column("q");
  if (t.rows.empty()) throw FormatError("Q CSV has no rows");
  std::size_t n_s = 0;
  std::size_t n_a = 0;
  for (const auto& row : t.rows) {
    n_s = std::max<std::size_t>(n_s, parse_u64(row[cs]) + 1);
    n_a = std::max<std::size_t>(n_a, parse_u64(row[ca]) + 1);
  }
  if (t.rows.size() != n_s * n_a) throw FormatError("Q CSV must list every (state, action)");
  QTable q(n_s, n_a, NAN);
  std::vector<char> seen(n_s * n_a, 0);
  for (const auto& row : t.rows) {
    const auto s = parse_u64(row[cs]);
    const auto a = parse_u64(row[ca]);
    if (seen[s * n_a + a]++) throw FormatError("Q CSV repeats an entry");
    q(s, a) = parse_double(row[cq]);
  }
  return q;
}

}  // namespace softclip
