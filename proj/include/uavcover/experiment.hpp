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

// Experiment protocol: a fresh controller per seed, a fixed number of
// episodes with decaying exploration, selection of the cheapest covering
// episode, and mean/std aggregation across seeds.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uavcover/agent.hpp"
#include "uavcover/gridworld.hpp"

namespace uavcover {

struct Hyperparameters {
  double epsilon = 0.49;
  double epsilon_decay = 0.93;
  double epsilon_min = 0.05;
  double gamma = 0.83;
  std::size_t memory_size = kDefaultMemoryCapacity;
  double learning_rate = kDefaultLearningRate;
  std::size_t batch_size = 16;
  std::size_t hidden_units = kDefaultHiddenUnits;
  bool allow_colocation = false;

  EpsilonSchedule epsilon_schedule() const {
    return {epsilon, epsilon_decay, epsilon_min};
  }
  ControllerConfig controller_config(ControllerMode mode) const;
};

inline constexpr int kDefaultEpisodes = 30;
inline constexpr int kBudgetPerFreeCell = 100;

struct ExperimentSpec {
  ExperimentSpec(std::string map_id, GridMap map);

  std::string map_id;
  GridMap map;
  int n_uavs = 1;
  ControllerMode mode = ControllerMode::Local;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int max_episodes = kDefaultEpisodes;
  std::optional<int> step_budget;  // unset: derived from the map
  Hyperparameters hyper;
};

// Throws ConfigError describing the first violated constraint.
void validate(const ExperimentSpec& spec);

// Swarm-wide action budget per episode standing in for the flight-time
// cap: kBudgetPerFreeCell actions per Free cell unless overridden.
int step_budget_from_flight_time(const GridMap& map, int n_uavs,
                                 std::optional<int> override_budget = {});

struct EpisodeRecord {
  int total_actions = 0;
  bool covered = false;
  std::vector<int> per_uav_actions;
  std::vector<std::vector<Action>> paths;  // per UAV, in order taken

  bool operator==(const EpisodeRecord&) const = default;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<Cell> starts;
  std::vector<EpisodeRecord> per_episode;
  std::optional<int> best_total_actions;
  std::optional<int> best_episode;  // earliest episode achieving the best

  bool operator==(const RunResult&) const = default;
};

// Plays one episode from the start cells. Networks and memories in
// `controller` carry over between calls.
EpisodeRecord run_episode(const ExperimentSpec& spec, Controller& controller,
                          int episode_index, std::mt19937_64& rng);

RunResult run_seed(const ExperimentSpec& spec, std::uint64_t seed);

// One RunResult per seed, in seed order. Runs may execute on up to
// `parallelism` threads; results do not depend on it.
std::vector<RunResult> run_experiment(const ExperimentSpec& spec,
                                      unsigned parallelism = 1);

struct AggregateStats {
  double mean = 0.0;
  double std = 0.0;  // sample (n-1); 0 for a single covering seed
  int n_runs = 0;
  int n_failed = 0;
};

// Statistics of best_total_actions over covering seeds. Throws
// ContractViolation on an empty list and AllRunsFailed when no seed covered.
AggregateStats aggregate(std::span<const RunResult> results);

// Results CSV. One row per episode then a summary row per run:
//   episode rows:  ...,<episode>,<total_actions>,<0|1>,
//   summary row:   ...,best,<best total or empty>,<0|1>,<best or empty>
void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const ExperimentSpec& spec,
                    const RunResult& run);

// Best-episode trace, one line per UAV:
//   map_id,n_uavs,mode,seed,episode,uav,start_row,start_col,allow_colocation,actions
// `actions` is the UAV's action codes as a digit string.
struct TraceRecord {
  std::string map_id;
  int n_uavs = 0;
  ControllerMode mode = ControllerMode::Local;
  std::uint64_t seed = 0;
  int episode = 0;
  bool allow_colocation = false;
  std::vector<Cell> starts;
  std::vector<std::vector<Action>> paths;
};

void write_trace_header(std::ostream& out);
void write_trace_rows(std::ostream& out, const ExperimentSpec& spec,
                      const RunResult& run);
// Throws FormatError with a line number on malformed input.
std::vector<TraceRecord> read_traces(std::istream& in);

// Trace file path that accompanies a results CSV ("x.csv" -> "x.trace.csv").
std::string trace_path_for(const std::string& csv_path);

// Re-executes a trace in the original round-robin order.
SwarmState replay_trace(const GridMap& map, const TraceRecord& trace);

}  // namespace uavcover
