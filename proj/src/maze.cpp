#include "softclip/maze.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "softclip/csv.hpp"
#include "softclip/error.hpp"

namespace softclip {

namespace {

constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDy[4] = {-1, 1, 0, 0};

// The two directions at right angles to each action.
constexpr std::size_t kPerp[4][2] = {{kLeft, kRight}, {kLeft, kRight}, {kUp, kDown}, {kUp, kDown}};

std::size_t cell_index(const MazeSpec& spec, Cell c) {
  return static_cast<std::size_t>(c.y * spec.width + c.x);
}

}  // namespace

void MazeSpec::validate() const {
  if (width <= 0 || height <= 0) throw InvalidArgument("maze: dimensions must be positive");
  if (walls.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidArgument("maze: wall grid shape mismatch");
  }
  if (!open(goal) || !open(start)) throw InvalidArgument("maze: goal and start must be open");
  if (goal == start) throw InvalidArgument("maze: goal and start must differ");
  if (!all_open_cells_reach_goal(*this)) throw InvalidArgument("maze: goal not reachable");
}

void SlipModel::validate() const {
  if (!(p_intended >= 0.0 && p_perp >= 0.0) ||
      std::abs(p_intended + 2.0 * p_perp - 1.0) > 1e-12) {
    throw InvalidArgument("slip probabilities must be nonnegative with p_intended + 2 p_perp = 1");
  }
}

Cell move(const MazeSpec& spec, Cell c, std::size_t a) {
  const Cell to{c.x + kDx[a], c.y + kDy[a]};
  return spec.open(to) ? to : c;
}

bool all_open_cells_reach_goal(const MazeSpec& spec) {
  // Moves are reversible between open neighbours, so reachability of the
  // goal from a cell is the same as reachability of the cell from the goal.
  std::vector<char> seen(spec.walls.size(), 0);
  std::vector<Cell> stack{spec.goal};
  seen[cell_index(spec, spec.goal)] = 1;
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    for (std::size_t a = 0; a < kMazeActions; ++a) {
      const Cell n{c.x + kDx[a], c.y + kDy[a]};
      if (spec.open(n) && !seen[cell_index(spec, n)]) {
        seen[cell_index(spec, n)] = 1;
        stack.push_back(n);
      }
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!spec.walls[i] && !seen[i]) return false;
  }
  return true;
}

MazeSpec generate_maze(int width, int height, double wall_prob, std::uint64_t rng_seed,
                       std::size_t max_retries) {
  if (width <= 0 || height <= 0 || static_cast<long long>(width) * height < 2) {
    throw InvalidArgument("maze needs at least two cells");
  }
  if (!(wall_prob >= 0.0 && wall_prob <= 1.0)) throw InvalidArgument("wall_prob must be in [0, 1]");

  Rng rng(rng_seed);
  MazeSpec spec;
  spec.width = width;
  spec.height = height;
  spec.wall_prob = wall_prob;
  spec.seed = rng_seed;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::size_t> open;
  for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
    spec.walls.assign(n, 0);
    open.clear();
    for (std::size_t i = 0; i < n; ++i) {
      spec.walls[i] = rng.bernoulli(wall_prob) ? 1 : 0;
      if (!spec.walls[i]) open.push_back(i);
    }
    if (open.size() < 2) continue;
    const std::size_t g = rng.below(open.size());
    spec.goal = {static_cast<int>(open[g] % width), static_cast<int>(open[g] / width)};
    if (!all_open_cells_reach_goal(spec)) continue;
    std::size_t k = rng.below(open.size() - 1);
    if (k >= g) ++k;
    spec.start = {static_cast<int>(open[k] % width), static_cast<int>(open[k] / width)};
    return spec;
  }
  throw InvalidArgument("unsolvable configuration");
}

MazeIndex::MazeIndex(const MazeSpec& spec)
    : width_(spec.width), height_(spec.height), state_of_(spec.walls.size(), -1) {
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (spec.wall({x, y})) continue;
      state_of_[static_cast<std::size_t>(y * spec.width + x)] =
          static_cast<std::ptrdiff_t>(cells_.size());
      cells_.push_back({x, y});
    }
  }
  goal_ = state(spec.goal);
  start_ = state(spec.start);
}

std::size_t MazeIndex::state(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) {
    throw InvalidArgument("cell outside the grid");
  }
  const auto s = state_of_[static_cast<std::size_t>(c.y * width_ + c.x)];
  if (s < 0) throw InvalidArgument("cell is a wall");
  return static_cast<std::size_t>(s);
}

TabularMdp maze_to_mdp(const MazeSpec& spec, const SlipModel& slip, double step_reward,
                       double goal_reward, double gamma) {
  spec.validate();
  slip.validate();
  const MazeIndex index(spec);
  const std::size_t n_s = index.n_states();
  const std::size_t n_a = kMazeActions;
  std::vector<double> transition(n_s * n_a * n_s, 0.0);
  std::vector<double> outcome(n_s * n_a * n_s, step_reward);
  std::vector<char> terminal(n_s, 0);
  const std::size_t goal = index.goal_state();
  terminal[goal] = 1;

  for (std::size_t s = 0; s < n_s; ++s) {
    for (std::size_t a = 0; a < n_a; ++a) {
      const std::size_t k = s * n_a + a;
      double* row = transition.data() + k * n_s;
      double* rew = outcome.data() + k * n_s;
      if (s == goal) {
        row[s] = 1.0;
        rew[s] = 0.0;
        continue;
      }
      const Cell here = index.cell(s);
      const std::size_t dirs[3] = {a, kPerp[a][0], kPerp[a][1]};
      const double probs[3] = {slip.p_intended, slip.p_perp, slip.p_perp};
      for (int i = 0; i < 3; ++i) {
        if (probs[i] == 0.0) continue;
        row[index.state(move(spec, here, dirs[i]))] += probs[i];
      }
      rew[goal] = goal_reward;
    }
  }
  return TabularMdp(n_s, n_a, gamma, {}, std::move(transition), std::move(terminal),
                    std::move(outcome));
}

TabularMdp maze_to_mdp(const MazeSpec& spec, double gamma) {
  return maze_to_mdp(spec, SlipModel{}, -1.0, -0.25, gamma);
}

Transition sample_step(const TabularMdp& mdp, std::size_t s, std::size_t a, Rng& rng) {
  if (s >= mdp.n_states() || a >= mdp.n_actions()) throw InvalidArgument("sample_step: bad index");
  if (mdp.terminal(s)) throw InvalidArgument("sample_step: stepping from a terminal state");
  const Successor& pick = draw_successor(mdp.sparse().row(s, a), rng);
  return {pick.state, pick.reward, mdp.terminal(pick.state)};
}

void write_maze(std::ostream& out, const MazeSpec& spec) {
  out << "maze width=" << spec.width << " height=" << spec.height
      << " wall_prob=" << format_double(spec.wall_prob) << " seed=" << spec.seed << '\n';
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const Cell c{x, y};
      char ch = spec.wall(c) ? '#' : '.';
      if (c == spec.goal) ch = 'G';
      if (c == spec.start) ch = 'S';
      out << ch;
    }
    out << '\n';
  }
}

std::string maze_to_string(const MazeSpec& spec) {
  std::ostringstream out;
  write_maze(out, spec);
  return out.str();
}

MazeSpec read_maze(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("maze: empty input");
  auto fields = split(line, ' ');
  if (fields.empty() || fields[0] != "maze") throw FormatError("maze: missing metadata line");
  MazeSpec spec;
  bool have_w = false;
  bool have_h = false;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) throw FormatError("maze: bad metadata field");
    const auto key = fields[i].substr(0, eq);
    const auto value = fields[i].substr(eq + 1);
    if (key == "width") {
      spec.width = static_cast<int>(parse_u64(value));
      have_w = true;
    } else if (key == "height") {
      spec.height = static_cast<int>(parse_u64(value));
      have_h = true;
    } else if (key == "wall_prob") {
      spec.wall_prob = parse_double(value);
    } else if (key == "seed") {
      spec.seed = parse_u64(value);
    }
  }
  if (!have_w || !have_h || spec.width <= 0 || spec.height <= 0) {
    throw FormatError("maze: metadata needs positive width and height");
  }
  spec.walls.assign(static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height), 0);
  int goals = 0;
  int starts = 0;
  for (int y = 0; y < spec.height; ++y) {
    if (!std::getline(in, line)) throw FormatError("maze: too few grid rows");
    const auto row = trim(line);
    if (row.size() != static_cast<std::size_t>(spec.width)) throw FormatError("maze: row width mismatch");
    for (int x = 0; x < spec.width; ++x) {
      switch (row[static_cast<std::size_t>(x)]) {
        case '#':
          spec.walls[static_cast<std::size_t>(y * spec.width + x)] = 1;
          break;
        case '.':
          break;
        case 'G':
          spec.goal = {x, y};
          ++goals;
          break;
        case 'S':
          spec.start = {x, y};
          ++starts;
          break;
        default:
          throw FormatError("maze: unexpected character in grid");
      }
    }
  }
  if (goals != 1 || starts != 1) throw FormatError("maze: need exactly one G and one S");
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return spec;
}

}  // namespace softclip
