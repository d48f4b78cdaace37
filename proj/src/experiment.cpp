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

#include "uavcover/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "uavcover/errors.hpp"

namespace uavcover {

ControllerConfig Hyperparameters::controller_config(ControllerMode mode) const {
  ControllerConfig c;
  c.mode = mode;
  c.gamma = gamma;
  c.learning_rate = learning_rate;
  c.batch_size = batch_size;
  c.memory_capacity = memory_size;
  c.hidden_units = hidden_units;
  return c;
}

ExperimentSpec::ExperimentSpec(std::string id, GridMap m)
    : map_id(std::move(id)), map(std::move(m)) {}

void validate(const ExperimentSpec& spec) {
  auto fail = [&spec](const std::string& what) {
    throw ConfigError(spec.map_id + ": " + what);
  };
  if (spec.n_uavs < 1 || spec.n_uavs > 9) {
    fail("n_uavs must be in 1..9, got " + std::to_string(spec.n_uavs));
  }
  if (spec.n_uavs > spec.map.free_cell_count()) {
    fail(std::to_string(spec.n_uavs) + " UAVs do not fit on " +
         std::to_string(spec.map.free_cell_count()) + " free cells");
  }
  if (spec.seeds.empty()) fail("at least one seed is required");
  if (spec.max_episodes < 1) fail("max_episodes must be positive");
  if (spec.step_budget && *spec.step_budget < 0) {
    fail("step_budget must be non-negative");
  }
  const Hyperparameters& h = spec.hyper;
  auto probability = [&fail](const char* name, double v) {
    if (!(v > 0.0 && v <= 1.0)) {
      fail(std::string(name) + " must be in (0, 1], got " + std::to_string(v));
    }
  };
  probability("epsilon", h.epsilon);
  probability("epsilon_decay", h.epsilon_decay);
  probability("epsilon_min", h.epsilon_min);
  probability("gamma", h.gamma);
  if (!(h.learning_rate > 0.0) || !std::isfinite(h.learning_rate)) {
    fail("learning_rate must be positive");
  }
  if (h.memory_size == 0) fail("memory_size must be positive");
  if (h.batch_size == 0) fail("batch_size must be positive");
  if (h.hidden_units == 0) fail("hidden_units must be positive");
}

int step_budget_from_flight_time(const GridMap& map, int /*n_uavs*/,
                                 std::optional<int> override_budget) {
  if (override_budget) return *override_budget;
  return kBudgetPerFreeCell * map.free_cell_count();
}

EpisodeRecord run_episode(const ExperimentSpec& spec, Controller& controller,
                          int episode_index, std::mt19937_64& rng) {
  const int n = spec.n_uavs;
  SwarmEnv env;
  env.map = &spec.map;
  env.state = initial_state(spec.map, n);
  env.rules.allow_colocation = spec.hyper.allow_colocation;
  env.step_budget = step_budget_from_flight_time(spec.map, n, spec.step_budget);

  const double epsilon = spec.hyper.epsilon_schedule().value(episode_index);

  EpisodeRecord rec;
  rec.paths.resize(static_cast<std::size_t>(n));
  while (!is_coverage_complete(spec.map, env.state) &&
         !env.budget_exhausted()) {
    StepResult step = step_swarm(env, controller, epsilon, rng);
    for (const Experience& exp : step.experiences) {
      rec.paths[exp.uav].push_back(exp.action);
    }
    if (step.done) break;
  }
  rec.covered = is_coverage_complete(spec.map, env.state);
  rec.per_uav_actions = env.state.per_uav_actions;
  rec.total_actions =
      std::accumulate(rec.per_uav_actions.begin(), rec.per_uav_actions.end(), 0);
  return rec;
}

RunResult run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 rng(seed);
  Controller controller(spec.hyper.controller_config(spec.mode), spec.map,
                        static_cast<std::size_t>(spec.n_uavs), rng);

  RunResult run;
  run.seed = seed;
  run.starts = spec.map.start_positions(spec.n_uavs);
  run.per_episode.reserve(static_cast<std::size_t>(spec.max_episodes));
  for (int ep = 0; ep < spec.max_episodes; ++ep) {
    EpisodeRecord rec = run_episode(spec, controller, ep, rng);
    if (rec.covered &&
        (!run.best_total_actions || rec.total_actions < *run.best_total_actions)) {
      run.best_total_actions = rec.total_actions;
      run.best_episode = ep;
    }
    run.per_episode.push_back(std::move(rec));
  }
  return run;
}

std::vector<RunResult> run_experiment(const ExperimentSpec& spec,
                                      unsigned parallelism) {
  validate(spec);
  std::vector<RunResult> results(spec.seeds.size());
  const unsigned workers = std::clamp<unsigned>(
      parallelism, 1u, static_cast<unsigned>(spec.seeds.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
      results[i] = run_seed(spec, spec.seeds[i]);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < spec.seeds.size(); i = next++) {
          try {
            results[i] = run_seed(spec, spec.seeds[i]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

AggregateStats aggregate(std::span<const RunResult> results) {
  if (results.empty()) throw ContractViolation("aggregate of zero runs");
  std::vector<double> best;
  for (const RunResult& r : results) {
    if (r.best_total_actions) best.push_back(*r.best_total_actions);
  }
  AggregateStats stats;
  stats.n_runs = static_cast<int>(results.size());
  stats.n_failed = stats.n_runs - static_cast<int>(best.size());
  if (best.empty()) {
    throw AllRunsFailed("no seed produced a covering episode (" +
                        std::to_string(stats.n_runs) + " runs)");
  }
  const double n = static_cast<double>(best.size());
  stats.mean = std::accumulate(best.begin(), best.end(), 0.0) / n;
  if (best.size() > 1) {
    double ss = 0.0;
    for (double b : best) ss += (b - stats.mean) * (b - stats.mean);
    stats.std = std::sqrt(ss / (n - 1.0));
  }
  return stats;
}

void write_csv_header(std::ostream& out) {
  out << "map_id,n_uavs,mode,seed,episode,total_actions,covered,"
         "best_total_actions\n";
}

void write_csv_rows(std::ostream& out, const ExperimentSpec& spec,
                    const RunResult& run) {
  const std::string prefix = spec.map_id + "," + std::to_string(spec.n_uavs) +
                             "," + std::string(mode_name(spec.mode)) + "," +
                             std::to_string(run.seed) + ",";
  for (std::size_t ep = 0; ep < run.per_episode.size(); ++ep) {
    const EpisodeRecord& rec = run.per_episode[ep];
    out << prefix << ep << ',' << rec.total_actions << ','
        << (rec.covered ? 1 : 0) << ",\n";
  }
  out << prefix << "best,";
  if (run.best_total_actions) out << *run.best_total_actions;
  out << ',' << (run.best_total_actions ? 1 : 0) << ',';
  if (run.best_total_actions) out << *run.best_total_actions;
  out << '\n';
}

void write_trace_header(std::ostream& out) {
  out << "map_id,n_uavs,mode,seed,episode,uav,start_row,start_col,"
         "allow_colocation,actions\n";
}

void write_trace_rows(std::ostream& out, const ExperimentSpec& spec,
                      const RunResult& run) {
  if (!run.best_episode) return;
  const auto ep = static_cast<std::size_t>(*run.best_episode);
  const EpisodeRecord& rec = run.per_episode[ep];
  for (std::size_t u = 0; u < rec.paths.size(); ++u) {
    out << spec.map_id << ',' << spec.n_uavs << ',' << mode_name(spec.mode)
        << ',' << run.seed << ',' << ep << ',' << u << ','
        << run.starts[u].row << ',' << run.starts[u].col << ','
        << (spec.hyper.allow_colocation ? 1 : 0) << ',';
    for (Action a : rec.paths[u]) out << action_code(a);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<TraceRecord> read_traces(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  int line_no = 0;
  auto fail = [&line_no](const std::string& what) {
    throw FormatError("trace line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("map_id,", 0) != 0) fail("missing header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 10) fail("expected 10 fields");
    TraceRecord rec;
    int uav = 0;
    int row = 0;
    int col = 0;
    try {
      rec.map_id = f[0];
      rec.n_uavs = std::stoi(f[1]);
      if (f[2] != "local" && f[2] != "global") fail("bad mode '" + f[2] + "'");
      rec.mode = f[2] == "local" ? ControllerMode::Local : ControllerMode::Global;
      rec.seed = std::stoull(f[3]);
      rec.episode = std::stoi(f[4]);
      uav = std::stoi(f[5]);
      row = std::stoi(f[6]);
      col = std::stoi(f[7]);
      rec.allow_colocation = f[8] == "1";
    } catch (const std::logic_error&) {
      fail("malformed number");
    }
    std::vector<Action> path;
    for (char ch : f[9]) {
      if (ch < '0' || ch > '3') fail("bad action code");
      path.push_back(static_cast<Action>(ch - '0'));
    }

    const bool continues =
        !out.empty() && out.back().map_id == rec.map_id &&
        out.back().n_uavs == rec.n_uavs && out.back().mode == rec.mode &&
        out.back().seed == rec.seed && out.back().episode == rec.episode &&
        static_cast<int>(out.back().paths.size()) == uav;
    if (uav != 0 && !continues) fail("UAV rows out of order");
    if (uav == 0) out.push_back(rec);
    out.back().starts.push_back({row, col});
    out.back().paths.push_back(std::move(path));
  }
  for (const TraceRecord& r : out) {
    if (static_cast<int>(r.paths.size()) != r.n_uavs) {
      throw FormatError("trace for seed " + std::to_string(r.seed) +
                        " is missing UAV rows");
    }
  }
  return out;
}

std::string trace_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  p.replace_extension(".trace" + ext);
  return p.string();
}

SwarmState replay_trace(const GridMap& map, const TraceRecord& trace) {
  SwarmState state = initial_state(map, trace.starts);
  TransitionRules rules{trace.allow_colocation};
  std::size_t longest = 0;
  for (const auto& p : trace.paths) longest = std::max(longest, p.size());
  for (std::size_t t = 0; t < longest; ++t) {
    for (std::size_t u = 0; u < trace.paths.size(); ++u) {
      if (t >= trace.paths[u].size()) continue;
      state = transition(map, state, u, trace.paths[u][t], rules).first;
    }
  }
  return state;
}

}  // namespace uavcover
