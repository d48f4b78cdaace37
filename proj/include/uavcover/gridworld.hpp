// Copyright 2026 The uavcover Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Flight environment for coverage planning: obstacle grid maps, swarm state,
// the transition and reward functions, and the network observation encoding.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uavcover {

struct Cell {
  int row = 0;
  int col = 0;

  auto operator<=>(const Cell&) const = default;
};

enum class CellKind : std::uint8_t { Free, Obstacle };

// Codes 0..3 in compass order.
enum class Action : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::North, Action::East, Action::South, Action::West};

constexpr int action_code(Action a) noexcept { return static_cast<int>(a); }

// Throws ContractViolation for codes outside 0..3.
Action action_from_code(int code);

const char* action_name(Action a) noexcept;

// Cell one step away in the direction of `a`. May be off-grid.
Cell displaced(Cell origin, Action a) noexcept;

// A digit in a map file marking where UAV `digit` starts.
struct StartMarker {
  int digit = 0;
  Cell cell;

  bool operator==(const StartMarker&) const = default;
};

// Immutable obstacle grid. Construction enforces the map invariants:
// at least 2x2, at least one Free cell, all Free cells 4-connected.
class GridMap {
 public:
  GridMap(int rows, int cols, std::vector<CellKind> cells,
          std::vector<StartMarker> starts = {});

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  int free_cell_count() const noexcept { return free_count_; }

  bool in_bounds(Cell c) const noexcept {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }
  // Flat row-major index; `c` must be in bounds.
  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col);
  }
  CellKind kind(Cell c) const noexcept { return cells_[index(c)]; }
  bool is_free(Cell c) const noexcept {
    return in_bounds(c) && kind(c) == CellKind::Free;
  }

  // Designated starts sorted by digit.
  const std::vector<StartMarker>& start_markers() const noexcept {
    return starts_;
  }

  // Start cells for a swarm of `n_uavs`: designated digits first, then the
  // remaining Free cells in row-major order. Throws ContractViolation when
  // the map has fewer Free cells than UAVs.
  std::vector<Cell> start_positions(int n_uavs) const;

  // Map file text, one LF-terminated line per row.
  std::string serialize() const;

  bool operator==(const GridMap&) const = default;

 private:
  int rows_;
  int cols_;
  std::vector<CellKind> cells_;
  std::vector<StartMarker> starts_;
  int free_count_ = 0;
};

// Parses the map file format: '.' Free, '#' Obstacle, '1'..'9' Free start
// cells. Lines are LF-separated and must have equal length; a final LF is
// optional.
GridMap parse_map(std::string_view text);

struct SwarmState {
  std::vector<Cell> positions;
  std::vector<std::uint8_t> visited;  // row-major, 1 = visited
  std::vector<int> per_uav_actions;
  int global_step = 0;

  std::size_t uav_count() const noexcept { return positions.size(); }
  int visited_count() const noexcept;
  bool operator==(const SwarmState&) const = default;
};

// State at the start of an episode: UAVs on their start cells, which are
// pre-marked visited, all counters zero.
SwarmState initial_state(const GridMap& map, const std::vector<Cell>& starts);
SwarmState initial_state(const GridMap& map, int n_uavs);

enum class MoveKind : std::uint8_t { NewCell, VisitedCell, Blocked };

const char* move_kind_name(MoveKind k) noexcept;

struct MoveOutcome {
  MoveKind kind = MoveKind::Blocked;
  double reward = 0.0;
  Cell new_position;
};

namespace rewards {
inline constexpr double kNewCellBase = 29.40;
inline constexpr double kVisitedCell = -31.66;
inline constexpr double kBlocked = -45.44;
}  // namespace rewards

// Reward for entering an unvisited cell. Grows as fewer cells remain
// unvisited. Throws ContractViolation when non_visited_before_move < 1.
double new_cell_reward(int rows, int cols, int non_visited_before_move);

struct TransitionRules {
  // When false a move onto a cell held by another UAV is Blocked.
  bool allow_colocation = false;
};

// Moves `uav` one cell. Off-grid, obstacle and (unless allowed) occupied
// targets leave the UAV in place as Blocked. Every call costs one action.
std::pair<SwarmState, MoveOutcome> transition(const GridMap& map,
                                              const SwarmState& state,
                                              std::size_t uav, Action action,
                                              TransitionRules rules = {});

int unvisited_free_cells(const GridMap& map, const SwarmState& state);

// Three row-major channels: obstacles, visited mask, UAV occupancy.
std::vector<double> encode_observation(const GridMap& map,
                                       const SwarmState& state);

bool is_coverage_complete(const GridMap& map, const SwarmState& state);

}  // namespace uavcover
