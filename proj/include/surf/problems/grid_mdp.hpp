#pragma once

// Deep-sea-treasure style grid worlds. Cells are water, obstacles, or
// treasures; the agent moves in four directions (bumping into walls or
// obstacles leaves it in place). Objective 1 charges one unit of time per
// step, objective 2 pays the treasure value. A treasure cell moves every
// action into a shared absorbing state with zero reward.

#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "surf/problems/mdp_problem.hpp"

namespace surf {

struct GridCell {
  int row = 0;
  int col = 0;
  auto operator<=>(const GridCell&) const = default;
};

struct GridLayout {
  int rows = 0;
  int cols = 0;
  std::set<GridCell> obstacles;
  std::map<GridCell, double> treasures;
  GridCell start{};
  double gamma = 0.9;
  double beta = 1.5;

  /// '#' obstacle, digit treasure value, 'S' start, '.' water.
  static GridLayout from_ascii(const std::vector<std::string>& lines, double gamma, double beta) {
    GridLayout layout;
    layout.gamma = gamma;
    layout.beta = beta;
    layout.rows = static_cast<int>(lines.size());
    if (layout.rows == 0) throw Error(ErrorCode::shape, "problems", "grid map has no rows");
    layout.cols = static_cast<int>(lines.front().size());
    bool has_start = false;
    for (int r = 0; r < layout.rows; ++r) {
      if (static_cast<int>(lines[static_cast<std::size_t>(r)].size()) != layout.cols) {
        throw Error(ErrorCode::shape, "problems", "grid map row " + std::to_string(r) + " has a different width");
      }
      for (int c = 0; c < layout.cols; ++c) {
        const char ch = lines[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        if (ch == '#') {
          layout.obstacles.insert({r, c});
        } else if (ch >= '0' && ch <= '9') {
          layout.treasures[{r, c}] = ch - '0';
        } else if (ch == 'S') {
          if (has_start) throw Error(ErrorCode::shape, "problems", "grid map has more than one start");
          layout.start = {r, c};
          has_start = true;
        } else if (ch != '.') {
          throw Error(ErrorCode::shape, "problems", std::string("unknown grid map character '") + ch + "'");
        }
      }
    }
    if (!has_start) throw Error(ErrorCode::shape, "problems", "grid map has no start cell 'S'");
    return layout;
  }
};

/// Builds the MDP over cells reachable from the start plus one absorbing
/// state. Unreachable cells and treasures are reported as warnings.
inline MdpProblem grid_mdp_builder(const GridLayout& layout) {
  constexpr int kMoves[4][2] = {{-1, 0}, {0, 1}, {1, 0}, {0, -1}};
  const auto inside = [&](GridCell c) { return c.row >= 0 && c.row < layout.rows && c.col >= 0 && c.col < layout.cols; };
  const auto blocked = [&](GridCell c) { return !inside(c) || layout.obstacles.contains(c); };
  if (blocked(layout.start)) throw Error(ErrorCode::domain, "problems", "start cell is outside the grid or blocked");
  if (layout.treasures.empty()) throw Error(ErrorCode::domain, "problems", "grid needs at least one treasure");
  if (layout.treasures.contains(layout.start)) throw Error(ErrorCode::domain, "problems", "start cell holds a treasure");

  const auto step = [&](GridCell c, int a) {
    const GridCell next{c.row + kMoves[a][0], c.col + kMoves[a][1]};
    return blocked(next) ? c : next;
  };

  // Breadth-first reachability; treasure cells do not propagate.
  std::map<GridCell, std::size_t> state_of;
  std::vector<GridCell> cells;
  std::queue<GridCell> frontier;
  frontier.push(layout.start);
  state_of[layout.start] = 0;
  cells.push_back(layout.start);
  while (!frontier.empty()) {
    const GridCell c = frontier.front();
    frontier.pop();
    if (layout.treasures.contains(c)) continue;
    for (int a = 0; a < 4; ++a) {
      const GridCell next = step(c, a);
      if (!state_of.contains(next)) {
        state_of[next] = cells.size();
        cells.push_back(next);
        frontier.push(next);
      }
    }
  }

  std::vector<std::string> warnings;
  bool any_treasure = false;
  for (const auto& [cell, value] : layout.treasures) {
    if (state_of.contains(cell)) {
      any_treasure = true;
    } else {
      warnings.push_back("treasure at (" + std::to_string(cell.row) + "," + std::to_string(cell.col) + ") unreachable");
    }
  }
  if (!any_treasure) warnings.emplace_back("unreachable treasure set");
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const GridCell cell{r, c};
      if (!blocked(cell) && !state_of.contains(cell)) {
        warnings.push_back("cell (" + std::to_string(r) + "," + std::to_string(c) + ") unreachable, dropped");
      }
    }
  }

  const std::size_t absorbing = cells.size();
  const std::size_t states = cells.size() + 1;
  constexpr std::size_t actions = 4;
  Matrix transition = Matrix::Zero(static_cast<Eigen::Index>(states * actions), static_cast<Eigen::Index>(states));
  Vector r1 = Vector::Zero(static_cast<Eigen::Index>(states * actions));
  Vector r2 = Vector::Zero(static_cast<Eigen::Index>(states * actions));
  for (std::size_t s = 0; s < cells.size(); ++s) {
    const auto treasure = layout.treasures.find(cells[s]);
    for (std::size_t a = 0; a < actions; ++a) {
      const auto i = static_cast<Eigen::Index>(s * actions + a);
      r1(i) = -1.0;
      if (treasure != layout.treasures.end()) {
        transition(i, static_cast<Eigen::Index>(absorbing)) = 1.0;
        r2(i) = treasure->second;
      } else {
        transition(i, static_cast<Eigen::Index>(state_of.at(step(cells[s], static_cast<int>(a))))) = 1.0;
      }
    }
  }
  for (std::size_t a = 0; a < actions; ++a) {
    transition(static_cast<Eigen::Index>(absorbing * actions + a), static_cast<Eigen::Index>(absorbing)) = 1.0;
  }
  Vector rho = Vector::Zero(static_cast<Eigen::Index>(states));
  rho(0) = 1.0;
  const Vector reference_log =
      Vector::Constant(static_cast<Eigen::Index>(states * actions), -std::log(static_cast<double>(actions)));

  return MdpProblem(TabularKlMdp(states, actions, std::move(transition), std::move(r1), std::move(r2), layout.gamma,
                                 std::move(rho), layout.beta, reference_log),
                    std::move(warnings));
}

/// Default 4x5 preset.
inline GridLayout default_grid_layout() {
  return GridLayout::from_ascii({"S...1", ".#...", "..#.3", "5...9"}, 0.9, 1.5);
}

}  // namespace surf
