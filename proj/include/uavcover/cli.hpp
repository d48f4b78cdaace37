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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uavcover/experiment.hpp"

namespace uavcover::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

inline constexpr const char* kOutputDirEnv = "UAVCOVER_OUTPUT_DIR";

struct ExperimentEntry {
  std::string map;  // bundled id or resolved file path
  std::vector<int> n_uavs = {1};
  std::vector<ControllerMode> modes = {ControllerMode::Local};
};

struct RunConfig {
  std::vector<ExperimentEntry> experiments;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int episodes = kDefaultEpisodes;
  std::optional<int> step_budget;
  Hyperparameters hyper;
  std::string output = "results.csv";
  unsigned parallelism = 1;
  bool trace = false;
};

// Parses a YAML run configuration. Unknown keys and bad values raise
// ConfigError prefixed with "<path>:<line>:". Relative map paths resolve
// against the configuration file's directory.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const std::string& base_dir = ".");

// Runs every (map, n_uavs, mode) combination, writes the results CSV (and
// trace file when enabled) and prints the summary grid to `out`.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

struct RenderSelector {
  std::string map_id;
  std::uint64_t seed = 0;
  std::optional<int> n_uavs;
  std::optional<ControllerMode> mode;
};

int cmd_render(const std::string& csv_path, const RenderSelector& selector,
               std::ostream& out, std::ostream& err);

// ASCII picture of a swarm state: '#' obstacle, U+00B7 unvisited, U+25AA
// visited, UAV number for the final positions.
std::string render_state(const GridMap& map, const SwarmState& state);

int cmd_maps(std::ostream& out);

// Full command-line entry point; argv[0] is the program name.
int main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace uavcover::cli
