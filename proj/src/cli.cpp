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

#include "uavcover/cli.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "uavcover/errors.hpp"
#include "uavcover/maps.hpp"

namespace uavcover::cli {
namespace fs = std::filesystem;

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    fail_at(node.Mark(), what);
  }
  [[noreturn]] void fail_at(const YAML::Mark& mark,
                            const std::string& what) const {
    std::string where = origin_;
    if (!mark.is_null()) where += ":" + std::to_string(mark.line + 1);
    throw ConfigError(where + ": " + what);
  }

  template <class T>
  T as(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, "invalid value '" + node.Scalar() + "' for '" + key + "'");
    }
  }

  template <class T>
  std::vector<T> list(const YAML::Node& node, const std::string& key) const {
    std::vector<T> out;
    if (node.IsScalar()) {
      out.push_back(as<T>(node, key));
      return out;
    }
    if (!node.IsSequence() || node.size() == 0) {
      fail(node, "'" + key + "' must be a value or a non-empty list");
    }
    for (const YAML::Node& item : node) out.push_back(as<T>(item, key));
    return out;
  }

  void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                  const std::string& section) const {
    if (!map.IsMap()) fail(map, "'" + section + "' must be a mapping");
    for (auto it = map.begin(); it != map.end(); ++it) {
      const std::string key = it->first.Scalar();
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&key](const char* k) { return key == k; })) {
        fail(it->first, "unknown key '" + key + "' in " + section);
      }
    }
  }

 private:
  std::string origin_;
};

ControllerMode parse_mode(const ConfigReader& r, const YAML::Node& node) {
  const auto s = r.as<std::string>(node, "modes");
  if (s == "local") return ControllerMode::Local;
  if (s == "global") return ControllerMode::Global;
  r.fail(node, "mode must be 'local' or 'global', got '" + s + "'");
}

std::string resolve_map(const std::string& map, const std::string& base_dir) {
  if (find_bundled_map(map)) return map;
  fs::path p(map);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return p.lexically_normal().string();
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string format_stats(const std::vector<RunResult>& runs) {
  if (runs.empty()) return "-";
  std::ostringstream os;
  try {
    const AggregateStats s = aggregate(runs);
    os << std::fixed << std::setprecision(2) << s.mean << " ± " << s.std;
    if (s.n_failed > 0) os << " (" << s.n_failed << " failed)";
  } catch (const AllRunsFailed&) {
    os << "all " << runs.size() << " failed";
  }
  return os.str();
}

struct Job {
  std::size_t spec_index;
  std::uint64_t seed;
};

// Summary lines of a results CSV keyed by "map,n_uavs,mode,seed".
std::map<std::string, std::optional<int>> read_summary_rows(std::istream& in) {
  std::map<std::string, std::optional<int>> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 8 || f[4] != "best") continue;
    std::optional<int> best;
    if (!f[7].empty()) best = std::stoi(f[7]);
    out[f[0] + "," + f[1] + "," + f[2] + "," + f[3]] = best;
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const std::string& base_dir) {
  ConfigReader r(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    r.fail_at(e.mark, e.msg);
  }
  if (!root.IsMap()) {
    throw ConfigError(origin + ": configuration must be a mapping");
  }
  r.check_keys(root,
               {"output", "parallelism", "trace", "seeds", "episodes",
                "step_budget", "hyperparameters", "experiments"},
               "configuration");

  RunConfig cfg;
  if (auto n = root["output"]) cfg.output = r.as<std::string>(n, "output");
  if (auto n = root["parallelism"]) {
    const int p = r.as<int>(n, "parallelism");
    if (p < 1) r.fail(n, "parallelism must be at least 1");
    cfg.parallelism = static_cast<unsigned>(p);
  }
  if (auto n = root["trace"]) cfg.trace = r.as<bool>(n, "trace");
  if (auto n = root["seeds"]) cfg.seeds = r.list<std::uint64_t>(n, "seeds");
  if (auto n = root["episodes"]) {
    cfg.episodes = r.as<int>(n, "episodes");
    if (cfg.episodes < 1) r.fail(n, "episodes must be positive");
  }
  if (auto n = root["step_budget"]) {
    cfg.step_budget = r.as<int>(n, "step_budget");
    if (*cfg.step_budget < 0) r.fail(n, "step_budget must be non-negative");
  }
  if (auto h = root["hyperparameters"]) {
    r.check_keys(h,
                 {"epsilon", "epsilon_decay", "epsilon_min", "gamma",
                  "memory_size", "learning_rate", "batch_size", "hidden_units",
                  "allow_colocation"},
                 "hyperparameters");
    Hyperparameters& hp = cfg.hyper;
    auto probability = [&r, &h](const char* key, double& dst) {
      if (auto n = h[key]) {
        dst = r.as<double>(n, key);
        if (!(dst > 0.0 && dst <= 1.0)) {
          r.fail(n, std::string(key) + " must be in (0, 1]");
        }
      }
    };
    auto count = [&r, &h](const char* key, std::size_t& dst) {
      if (auto n = h[key]) {
        const long long v = r.as<long long>(n, key);
        if (v < 1) r.fail(n, std::string(key) + " must be positive");
        dst = static_cast<std::size_t>(v);
      }
    };
    probability("epsilon", hp.epsilon);
    probability("epsilon_decay", hp.epsilon_decay);
    probability("epsilon_min", hp.epsilon_min);
    probability("gamma", hp.gamma);
    count("memory_size", hp.memory_size);
    count("batch_size", hp.batch_size);
    count("hidden_units", hp.hidden_units);
    if (auto n = h["learning_rate"]) {
      hp.learning_rate = r.as<double>(n, "learning_rate");
      if (!(hp.learning_rate > 0.0)) {
        r.fail(n, "learning_rate must be positive");
      }
    }
    if (auto n = h["allow_colocation"]) {
      hp.allow_colocation = r.as<bool>(n, "allow_colocation");
    }
  }

  const YAML::Node exps = root["experiments"];
  if (!exps) throw ConfigError(origin + ": missing 'experiments' list");
  if (!exps.IsSequence() || exps.size() == 0) {
    r.fail(exps, "'experiments' must be a non-empty list");
  }
  for (const YAML::Node& e : exps) {
    r.check_keys(e, {"map", "uavs", "modes"}, "experiment");
    ExperimentEntry entry;
    const YAML::Node map = e["map"];
    if (!map) r.fail(e, "experiment is missing 'map'");
    entry.map = resolve_map(r.as<std::string>(map, "map"), base_dir);
    if (auto n = e["uavs"]) {
      entry.n_uavs = r.list<int>(n, "uavs");
      for (int u : entry.n_uavs) {
        if (u < 1 || u > 9) r.fail(n, "uavs must be in 1..9");
      }
    }
    if (auto n = e["modes"]) {
      entry.modes.clear();
      if (n.IsScalar()) {
        entry.modes.push_back(parse_mode(r, n));
      } else if (n.IsSequence() && n.size() > 0) {
        for (const YAML::Node& m : n) entry.modes.push_back(parse_mode(r, m));
      } else {
        r.fail(n, "'modes' must be a value or a non-empty list");
      }
    }
    cfg.experiments.push_back(std::move(entry));
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot read configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  fs::path dir = fs::path(path).parent_path();
  return parse_run_config(buf.str(), path, dir.empty() ? "." : dir.string());
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<ExperimentSpec> specs;
  try {
    std::map<std::string, GridMap> loaded;
    for (const ExperimentEntry& e : config.experiments) {
      auto it = loaded.find(e.map);
      if (it == loaded.end()) it = loaded.emplace(e.map, load_map(e.map)).first;
      for (int n : e.n_uavs) {
        for (ControllerMode mode : e.modes) {
          ExperimentSpec spec(e.map, it->second);
          spec.n_uavs = n;
          spec.mode = mode;
          spec.seeds = config.seeds;
          spec.max_episodes = config.episodes;
          spec.step_budget = config.step_budget;
          spec.hyper = config.hyper;
          validate(spec);
          specs.push_back(std::move(spec));
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  fs::path output(config.output);
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
    output = fs::path(dir) / output.filename();
  }

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::uint64_t seed : specs[i].seeds) jobs.push_back({i, seed});
  }
  std::vector<RunResult> results(jobs.size());
  try {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (std::size_t j = next++; j < jobs.size(); j = next++) {
        try {
          results[j] = run_seed(specs[jobs[j].spec_index], jobs[j].seed);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    const unsigned workers = std::clamp<unsigned>(
        config.parallelism, 1u, static_cast<unsigned>(jobs.size()));
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
  } catch (const std::exception& e) {
    err << "error: run failed: " << e.what() << '\n';
    return kExitRuntimeError;
  }

  auto write_file = [&err](const fs::path& path, const std::string& body) {
    if (path.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    f << body;
    if (!f) {
      err << "error: cannot write " << path.string() << '\n';
      return false;
    }
    return true;
  };

  std::ostringstream csv;
  write_csv_header(csv);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    write_csv_rows(csv, specs[jobs[j].spec_index], results[j]);
  }
  if (!write_file(output, csv.str())) return kExitRuntimeError;
  if (config.trace) {
    std::ostringstream trace;
    write_trace_header(trace);
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      write_trace_rows(trace, specs[jobs[j].spec_index], results[j]);
    }
    if (!write_file(trace_path_for(output.string()), trace.str())) {
      return kExitRuntimeError;
    }
  }

  // Summary grid: one line per (map, n_uavs), local and global side by side.
  std::vector<std::pair<std::string, int>> row_keys;
  std::map<std::pair<std::string, int>, std::vector<RunResult>> by_mode[2];
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const ExperimentSpec& s = specs[jobs[j].spec_index];
    auto key = std::make_pair(s.map_id, s.n_uavs);
    if (std::find(row_keys.begin(), row_keys.end(), key) == row_keys.end()) {
      row_keys.push_back(key);
    }
    by_mode[s.mode == ControllerMode::Local ? 0 : 1][key].push_back(results[j]);
  }
  std::size_t map_width = 3;
  for (const auto& k : row_keys) map_width = std::max(map_width, k.first.size());
  out << std::left << std::setw(static_cast<int>(map_width) + 2) << "map"
      << std::setw(6) << "uavs" << std::setw(28) << "local" << "global\n";
  for (const auto& key : row_keys) {
    out << std::left << std::setw(static_cast<int>(map_width) + 2) << key.first
        << std::setw(6) << key.second;
    const std::string local = format_stats(by_mode[0][key]);
    // setw counts bytes; the +/- sign is two bytes in UTF-8.
    const int pad = local.find("±") != std::string::npos ? 29 : 28;
    out << std::setw(pad) << local << format_stats(by_mode[1][key]) << '\n';
  }
  out << "results: " << output.string() << '\n';
  if (config.trace) out << "trace: " << trace_path_for(output.string()) << '\n';
  return kExitOk;
}

std::string render_state(const GridMap& map, const SwarmState& state) {
  std::string text;
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      const Cell cell{r, c};
      auto uav = std::find(state.positions.begin(), state.positions.end(), cell);
      if (uav != state.positions.end()) {
        text += std::to_string(uav - state.positions.begin() + 1);
      } else if (map.kind(cell) == CellKind::Obstacle) {
        text += '#';
      } else if (state.visited[map.index(cell)]) {
        text += "▪";
      } else {
        text += "·";
      }
    }
    text += '\n';
  }
  return text;
}

int cmd_render(const std::string& csv_path, const RenderSelector& selector,
               std::ostream& out, std::ostream& err) {
  std::ifstream csv(csv_path, std::ios::binary);
  if (!csv) {
    err << "error: cannot read " << csv_path << '\n';
    return kExitConfigError;
  }
  const std::string trace_path = trace_path_for(csv_path);
  std::ifstream trace_in(trace_path, std::ios::binary);
  if (!trace_in) {
    err << "error: no trace file " << trace_path
        << " (re-run with trace enabled)\n";
    return kExitConfigError;
  }

  try {
    const auto summaries = read_summary_rows(csv);
    const auto traces = read_traces(trace_in);
    int matched = 0;
    for (const TraceRecord& t : traces) {
      if (t.map_id != selector.map_id || t.seed != selector.seed) continue;
      if (selector.n_uavs && t.n_uavs != *selector.n_uavs) continue;
      if (selector.mode && t.mode != *selector.mode) continue;
      ++matched;

      const GridMap map = load_map(t.map_id);
      const SwarmState final_state = replay_trace(map, t);
      const int actions = final_state.global_step;
      const std::string key = t.map_id + "," + std::to_string(t.n_uavs) + "," +
                              std::string(mode_name(t.mode)) + "," +
                              std::to_string(t.seed);
      auto summary = summaries.find(key);
      if (summary == summaries.end() || !summary->second ||
          *summary->second != actions) {
        err << "error: trace for " << key
            << " does not match the results file\n";
        return kExitRuntimeError;
      }
      if (matched > 1) out << '\n';
      out << t.map_id << " uavs=" << t.n_uavs << " mode=" << mode_name(t.mode)
          << " seed=" << t.seed << " episode=" << t.episode
          << " actions=" << actions << '\n';
      out << render_state(map, final_state);
    }
    if (matched == 0) {
      err << "error: no traced run matches map '" << selector.map_id
          << "' seed " << selector.seed << '\n';
      return kExitConfigError;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

int cmd_maps(std::ostream& out) {
  for (const BundledMap& m : bundled_maps()) {
    const GridMap map = parse_map(m.text);
    out << std::left << std::setw(16) << m.id << map.rows() << 'x' << map.cols()
        << "  " << std::right << std::setw(2) << map.free_cell_count()
        << " free  " << m.description << '\n';
  }
  return kExitOk;
}

int main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  const Hyperparameters defaults;
  CLI::App app{"Q-Learning coverage path planning for UAV swarms",
               "uavcover"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run experiments from a YAML config");
  std::string config_path;
  std::optional<std::string> output;
  std::optional<unsigned> jobs;
  std::vector<std::uint64_t> seeds;
  std::optional<int> episodes;
  std::optional<int> budget;
  bool trace = false;
  std::optional<double> epsilon, decay, epsilon_min, gamma, lr;
  std::optional<std::size_t> memory, batch, hidden;
  bool colocation = false;
  auto dflt = [](const std::string& d) { return " [default: " + d + "]"; };
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("-o,--output", output, "results CSV path");
  run->add_option("-j,--jobs", jobs, "parallel runs" + dflt("1"));
  run->add_option("--seeds", seeds, "seeds" + dflt("1 2 3 4 5"))
      ->delimiter(',');
  run->add_option("--episodes", episodes,
                  "episodes per run" + dflt(std::to_string(kDefaultEpisodes)));
  run->add_option("--step-budget", budget,
                  "swarm actions per episode" +
                      dflt(std::to_string(kBudgetPerFreeCell) +
                           " x free cells"));
  run->add_flag("--trace", trace, "write best-episode traces");
  run->add_option("--epsilon", epsilon,
                  "initial exploration rate" + dflt(format_double(defaults.epsilon)));
  run->add_option("--epsilon-decay", decay,
                  "per-episode epsilon factor" +
                      dflt(format_double(defaults.epsilon_decay)));
  run->add_option("--epsilon-min", epsilon_min,
                  "epsilon floor" + dflt(format_double(defaults.epsilon_min)));
  run->add_option("--gamma", gamma,
                  "discount factor" + dflt(format_double(defaults.gamma)));
  run->add_option("--memory-size", memory,
                  "replay memory capacity" +
                      dflt(std::to_string(defaults.memory_size)));
  run->add_option("--learning-rate", lr,
                  "SGD learning rate" +
                      dflt(format_double(defaults.learning_rate)));
  run->add_option("--batch-size", batch,
                  "replay samples per action" +
                      dflt(std::to_string(defaults.batch_size)));
  run->add_option("--hidden-units", hidden,
                  "first dense layer width" +
                      dflt(std::to_string(defaults.hidden_units)));
  run->add_flag("--allow-colocation", colocation,
                "let UAVs share a cell" + dflt("off"));

  CLI::App* render = app.add_subcommand("render", "draw a traced best episode");
  std::string csv_path;
  RenderSelector selector;
  std::optional<int> render_uavs;
  std::optional<std::string> render_mode;
  render->add_option("csv", csv_path, "results CSV written by run --trace")
      ->required();
  render->add_option("--map", selector.map_id, "map id")->required();
  render->add_option("--seed", selector.seed, "seed")->required();
  render->add_option("--uavs", render_uavs, "number of UAVs");
  render->add_option("--mode", render_mode, "local or global")
      ->check(CLI::IsMember({"local", "global"}));

  CLI::App* maps = app.add_subcommand("maps", "list bundled maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (maps->parsed()) return cmd_maps(out);

  if (render->parsed()) {
    selector.n_uavs = render_uavs;
    if (render_mode) {
      selector.mode =
          *render_mode == "local" ? ControllerMode::Local : ControllerMode::Global;
    }
    return cmd_render(csv_path, selector, out, err);
  }

  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (output) config.output = *output;
  if (jobs) config.parallelism = std::max(1u, *jobs);
  if (!seeds.empty()) config.seeds = seeds;
  if (episodes) config.episodes = *episodes;
  if (budget) config.step_budget = *budget;
  if (trace) config.trace = true;
  if (epsilon) config.hyper.epsilon = *epsilon;
  if (decay) config.hyper.epsilon_decay = *decay;
  if (epsilon_min) config.hyper.epsilon_min = *epsilon_min;
  if (gamma) config.hyper.gamma = *gamma;
  if (lr) config.hyper.learning_rate = *lr;
  if (memory) config.hyper.memory_size = *memory;
  if (batch) config.hyper.batch_size = *batch;
  if (hidden) config.hyper.hidden_units = *hidden;
  if (colocation) config.hyper.allow_colocation = true;
  return cmd_run(config, out, err);
}

}  // namespace uavcover::cli
