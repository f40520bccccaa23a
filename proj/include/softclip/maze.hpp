#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "softclip/mdp.hpp"
#include "softclip/rng.hpp"

namespace softclip {

struct Cell {
  int x = 0;  // column
  int y = 0;  // row, 0 at the top
  bool operator==(const Cell&) const = default;
};

/// Grid layout of a maze. Cells outside the grid behave like walls.
struct MazeSpec {
  int width = 0;
  int height = 0;
  std::vector<char> walls;  // row-major, width * height
  Cell goal;
  Cell start;
  double wall_prob = 0.0;
  std::uint64_t seed = 0;

  bool inside(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool wall(Cell c) const { return walls[static_cast<std::size_t>(c.y * width + c.x)] != 0; }
  bool open(Cell c) const { return inside(c) && !wall(c); }

  /// Throws InvalidArgument unless shapes agree, goal and start are open and
  /// distinct, and every open cell can reach the goal.
  void validate() const;
};

struct SlipModel {
  double p_intended = 0.75;
  double p_perp = 0.125;  // each of the two perpendicular directions

  void validate() const;
};

/// One sampled environment step.
struct Transition {
  std::size_t next_state = 0;
  double reward = 0.0;
  bool terminated = false;
};

enum Action : std::size_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr std::size_t kMazeActions = 4;

/// Cell reached by moving one step in direction `a`, or `c` itself if that
/// step leaves the grid or hits a wall.
Cell move(const MazeSpec& spec, Cell c, std::size_t a);

/// True if every open cell has a path to the goal (iterative DFS from the goal).
bool all_open_cells_reach_goal(const MazeSpec& spec);

/// Draws walls i.i.d. with `wall_prob`, then a uniform goal among open cells
/// and a uniform start among the remaining open cells. Redraws until every
/// open cell can reach the goal; throws InvalidArgument("unsolvable
/// configuration") after `max_retries` failed draws.
MazeSpec generate_maze(int width, int height, double wall_prob, std::uint64_t rng_seed,
                       std::size_t max_retries = 1000);

/// Open cells in row-major order are the MDP states.
class MazeIndex {
 public:
  explicit MazeIndex(const MazeSpec& spec);

  std::size_t n_states() const noexcept { return cells_.size(); }
  Cell cell(std::size_t state) const { return cells_[state]; }
  /// Throws InvalidArgument for walls and cells off the grid.
  std::size_t state(Cell c) const;
  std::size_t goal_state() const noexcept { return goal_; }
  std::size_t start_state() const noexcept { return start_; }

 private:
  int width_;
  int height_;
  std::vector<Cell> cells_;
  std::vector<std::ptrdiff_t> state_of_;  // per grid cell, -1 for walls
  std::size_t goal_;
  std::size_t start_;
};

/// Four-action stochastic maze MDP. Entering the goal pays `goal_reward` and
/// terminates; every other move pays `step_reward`. The goal's own rows are
/// zero-reward self-loops (never used: episodes stop on entry).
TabularMdp maze_to_mdp(const MazeSpec& spec, const SlipModel& slip, double step_reward,
                       double goal_reward, double gamma);

/// Maze with the default slip (0.75 / 0.125 / 0.125) and rewards (-1 per
/// step, -0.25 on reaching the goal).
TabularMdp maze_to_mdp(const MazeSpec& spec, double gamma);

/// Draws s' from the transition row of (s, a). Throws InvalidArgument when s
/// is terminal.
Transition sample_step(const TabularMdp& mdp, std::size_t s, std::size_t a, Rng& rng);

/// Text form: one metadata line, then the grid using '#' wall, '.' open,
/// 'G' goal and 'S' start.
void write_maze(std::ostream& out, const MazeSpec& spec);
MazeSpec read_maze(std::istream& in);
std::string maze_to_string(const MazeSpec& spec);

}  // namespace softclip
