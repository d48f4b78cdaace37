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

#include "uavcover/gridworld.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "uavcover/errors.hpp"

namespace uavcover {

Action action_from_code(int code) {
  if (code < 0 || code >= kNumActions) {
    throw ContractViolation("action code out of range: " +
                            std::to_string(code));
  }
  return static_cast<Action>(code);
}

const char* action_name(Action a) noexcept {
  switch (a) {
    case Action::North: return "north";
    case Action::East: return "east";
    case Action::South: return "south";
    case Action::West: return "west";
  }
  return "?";
}

Cell displaced(Cell origin, Action a) noexcept {
  switch (a) {
    case Action::North: return {origin.row - 1, origin.col};
    case Action::East: return {origin.row, origin.col + 1};
    case Action::South: return {origin.row + 1, origin.col};
    case Action::West: return {origin.row, origin.col - 1};
  }
  return origin;
}

const char* move_kind_name(MoveKind k) noexcept {
  switch (k) {
    case MoveKind::NewCell: return "new";
    case MoveKind::VisitedCell: return "visited";
    case MoveKind::Blocked: return "blocked";
  }
  return "?";
}

namespace {

// Size of the 4-connected Free component containing `seed`.
int flood_fill_size(int rows, int cols, const std::vector<CellKind>& cells,
                    Cell seed) {
  std::vector<std::uint8_t> seen(cells.size(), 0);
  auto idx = [cols](Cell c) {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(c.col);
  };
  std::queue<Cell> frontier;
  frontier.push(seed);
  seen[idx(seed)] = 1;
  int size = 0;
  while (!frontier.empty()) {
    Cell c = frontier.front();
    frontier.pop();
    ++size;
    for (Action a : kAllActions) {
      Cell n = displaced(c, a);
      if (n.row < 0 || n.row >= rows || n.col < 0 || n.col >= cols) continue;
      if (cells[idx(n)] != CellKind::Free || seen[idx(n)]) continue;
      seen[idx(n)] = 1;
      frontier.push(n);
    }
  }
  return size;
}

}  // namespace

GridMap::GridMap(int rows, int cols, std::vector<CellKind> cells,
                 std::vector<StartMarker> starts)
    : rows_(rows), cols_(cols), cells_(std::move(cells)),
      starts_(std::move(starts)) {
  if (rows_ < 2 || cols_ < 2) {
    throw FormatError("map must be at least 2x2, got " +
                      std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (cells_.size() != static_cast<std::size_t>(rows_) * cols_) {
    throw FormatError("cell count does not match map dimensions");
  }
  free_count_ = static_cast<int>(
      std::count(cells_.begin(), cells_.end(), CellKind::Free));
  if (free_count_ == 0) throw EmptyMapError("map has no free cells");

  std::sort(starts_.begin(), starts_.end(),
            [](const StartMarker& a, const StartMarker& b) {
              return a.digit < b.digit;
            });
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    const StartMarker& s = starts_[i];
    if (s.digit < 1 || s.digit > 9) {
      throw FormatError("start digit out of range: " +
                        std::to_string(s.digit));
    }
    if (i > 0 && starts_[i - 1].digit == s.digit) {
      throw FormatError("duplicate start digit " + std::to_string(s.digit));
    }
    if (!in_bounds(s.cell) || kind(s.cell) != CellKind::Free) {
      throw FormatError("start marker not on a free cell");
    }
  }

  auto first_free = std::find(cells_.begin(), cells_.end(), CellKind::Free);
  auto offset = static_cast<int>(first_free - cells_.begin());
  Cell seed{offset / cols_, offset % cols_};
  int component = flood_fill_size(rows_, cols_, cells_, seed);
  if (component != free_count_) {
    throw DisconnectedMapError(
        "free cells are not 4-connected: component of " +
        std::to_string(component) + " out of " + std::to_string(free_count_));
  }
}

std::vector<Cell> GridMap::start_positions(int n_uavs) const {
  if (n_uavs < 0 || n_uavs > free_count_) {
    throw ContractViolation("cannot place " + std::to_string(n_uavs) +
                            " UAVs on a map with " +
                            std::to_string(free_count_) + " free cells");
  }
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(n_uavs));
  for (const StartMarker& s : starts_) {
    if (static_cast<int>(out.size()) == n_uavs) break;
    out.push_back(s.cell);
  }
  for (int r = 0; r < rows_ && static_cast<int>(out.size()) < n_uavs; ++r) {
    for (int c = 0; c < cols_ && static_cast<int>(out.size()) < n_uavs; ++c) {
      Cell cell{r, c};
      if (kind(cell) != CellKind::Free) continue;
      if (std::find(out.begin(), out.end(), cell) != out.end()) continue;
      out.push_back(cell);
    }
  }
  return out;
}

std::string GridMap::serialize() const {
  std::string text;
  text.reserve(cells_.size() + static_cast<std::size_t>(rows_));
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      text.push_back(kind({r, c}) == CellKind::Obstacle ? '#' : '.');
    }
    text.push_back('\n');
  }
  for (const StartMarker& s : starts_) {
    text[static_cast<std::size_t>(s.cell.row) * (cols_ + 1) + s.cell.col] =
        static_cast<char>('0' + s.digit);
  }
  return text;
}

GridMap parse_map(std::string_view text) {
  while (!text.empty() && text.back() == '\n') text.remove_suffix(1);
  if (text.empty()) throw FormatError("map text is empty");

  std::vector<CellKind> cells;
  std::vector<StartMarker> starts;
  int rows = 0;
  int cols = -1;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    if (cols < 0) {
      cols = static_cast<int>(line.size());
    } else if (static_cast<int>(line.size()) != cols) {
      throw FormatError("line " + std::to_string(rows + 1) + " has length " +
                        std::to_string(line.size()) + ", expected " +
                        std::to_string(cols));
    }
    for (std::size_t c = 0; c < line.size(); ++c) {
      char ch = line[c];
      if (ch == '.') {
        cells.push_back(CellKind::Free);
      } else if (ch == '#') {
        cells.push_back(CellKind::Obstacle);
      } else if (ch >= '1' && ch <= '9') {
        cells.push_back(CellKind::Free);
        starts.push_back({ch - '0', {rows, static_cast<int>(c)}});
      } else {
        throw FormatError("line " + std::to_string(rows + 1) + ", column " +
                          std::to_string(c + 1) + ": unexpected character '" +
                          std::string(1, ch) + "'");
      }
    }
    ++rows;
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return GridMap(rows, cols, std::move(cells), std::move(starts));
}

int SwarmState::visited_count() const noexcept {
  return static_cast<int>(std::accumulate(visited.begin(), visited.end(), 0));
}

SwarmState initial_state(const GridMap& map, const std::vector<Cell>& starts) {
  SwarmState s;
  s.positions = starts;
  s.visited.assign(map.cell_count(), 0);
  s.per_uav_actions.assign(starts.size(), 0);
  for (Cell c : starts) {
    if (!map.is_free(c)) throw ContractViolation("start cell is not free");
    s.visited[map.index(c)] = 1;
  }
  return s;
}

SwarmState initial_state(const GridMap& map, int n_uavs) {
  return initial_state(map, map.start_positions(n_uavs));
}

double new_cell_reward(int rows, int cols, int non_visited_before_move) {
  if (non_visited_before_move < 1) {
    throw ContractViolation(
        "new cell reward needs at least one unvisited cell");
  }
  return rewards::kNewCellBase *
         (1.0 + static_cast<double>(std::max(rows, cols)) /
                    static_cast<double>(non_visited_before_move));
}

int unvisited_free_cells(const GridMap& map, const SwarmState& state) {
  int visited_free = 0;
  for (std::size_t i = 0; i < state.visited.size(); ++i) {
    int r = static_cast<int>(i) / map.cols();
    int c = static_cast<int>(i) % map.cols();
    if (state.visited[i] && map.kind({r, c}) == CellKind::Free) ++visited_free;
  }
  return map.free_cell_count() - visited_free;
}

std::pair<SwarmState, MoveOutcome> transition(const GridMap& map,
                                              const SwarmState& state,
                                              std::size_t uav, Action action,
                                              TransitionRules rules) {
  if (uav >= state.uav_count()) {
    throw ContractViolation("UAV index " + std::to_string(uav) +
                            " out of range");
  }
  SwarmState next = state;
  const Cell origin = state.positions[uav];
  const Cell target = displaced(origin, action);
  next.per_uav_actions[uav] += 1;
  next.global_step += 1;

  bool blocked = !map.is_free(target);
  if (!blocked && !rules.allow_colocation) {
    for (std::size_t j = 0; j < state.uav_count(); ++j) {
      if (j != uav && state.positions[j] == target) {
        blocked = true;
        break;
      }
    }
  }
  if (blocked) {
    return {std::move(next), {MoveKind::Blocked, rewards::kBlocked, origin}};
  }

  next.positions[uav] = target;
  auto& mark = next.visited[map.index(target)];
  if (mark) {
    return {std::move(next),
            {MoveKind::VisitedCell, rewards::kVisitedCell, target}};
  }
  double reward = new_cell_reward(map.rows(), map.cols(),
                                  unvisited_free_cells(map, state));
  mark = 1;
  return {std::move(next), {MoveKind::NewCell, reward, target}};
}

std::vector<double> encode_observation(const GridMap& map,
                                       const SwarmState& state) {
  const std::size_t n = map.cell_count();
  std::vector<double> obs(3 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    int r = static_cast<int>(i) / map.cols();
    int c = static_cast<int>(i) % map.cols();
    if (map.kind({r, c}) == CellKind::Obstacle) obs[i] = 1.0;
    if (i < state.visited.size() && state.visited[i]) obs[n + i] = 1.0;
  }
  for (Cell p : state.positions) obs[2 * n + map.index(p)] = 1.0;
  return obs;
}

bool is_coverage_complete(const GridMap& map, const SwarmState& state) {
  return unvisited_free_cells(map, state) == 0;
}

}  // namespace uavcover
