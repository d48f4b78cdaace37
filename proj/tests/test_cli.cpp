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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavcover/errors.hpp"
#include "uavcover/maps.hpp"

namespace uavcover::cli {
namespace {

namespace fs = std::filesystem;

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("uavcover_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  fs::path path_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

int run_main(std::vector<std::string> args, std::string* out = nullptr,
             std::string* err = nullptr) {
  args.insert(args.begin(), "uavcover");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

// A 5x5 run small enough for unit tests.
std::string small_config(const std::string& output, bool trace = false) {
  return "output: " + output + "\n" + (trace ? "trace: true\n" : "") +
         "seeds: [1]\n"
         "hyperparameters:\n"
         "  hidden_units: 32\n"
         "experiments:\n"
         "  - map: grove_5x5\n"
         "    uavs: [1]\n"
         "    modes: local\n";
}

TEST(ParseConfig, DefaultsMatchDocumentedValues) {
  const RunConfig cfg = parse_run_config(
      "experiments:\n  - map: grove_5x5\n", "c.yaml");
  EXPECT_EQ(cfg.hyper.epsilon, 0.49);
  EXPECT_EQ(cfg.hyper.epsilon_decay, 0.93);
  EXPECT_EQ(cfg.hyper.epsilon_min, 0.05);
  EXPECT_EQ(cfg.hyper.gamma, 0.83);
  EXPECT_EQ(cfg.hyper.memory_size, 60u);
  EXPECT_EQ(cfg.hyper.hidden_units, 1013u);
  EXPECT_EQ(cfg.episodes, 30);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  ASSERT_EQ(cfg.experiments.size(), 1u);
  EXPECT_EQ(cfg.experiments[0].n_uavs, std::vector<int>{1});
  EXPECT_EQ(cfg.experiments[0].modes,
            std::vector<ControllerMode>{ControllerMode::Local});
  EXPECT_FALSE(cfg.trace);
}

TEST(ParseConfig, FullConfig) {
  const RunConfig cfg = parse_run_config(
      "output: out/r.csv\n"
      "parallelism: 3\n"
      "trace: true\n"
      "seeds: [4, 5]\n"
      "episodes: 12\n"
      "step_budget: 400\n"
      "hyperparameters:\n"
      "  epsilon: 0.3\n"
      "  gamma: 0.9\n"
      "  batch_size: 8\n"
      "  allow_colocation: true\n"
      "experiments:\n"
      "  - map: grove_5x5\n"
      "    uavs: [1, 2, 3]\n"
      "    modes: [local, global]\n"
      "  - map: custom/field.map\n",
      "dir/c.yaml", "dir");
  EXPECT_EQ(cfg.output, "out/r.csv");
  EXPECT_EQ(cfg.parallelism, 3u);
  EXPECT_TRUE(cfg.trace);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(cfg.episodes, 12);
  EXPECT_EQ(cfg.step_budget, 400);
  EXPECT_EQ(cfg.hyper.epsilon, 0.3);
  EXPECT_EQ(cfg.hyper.gamma, 0.9);
  EXPECT_EQ(cfg.hyper.batch_size, 8u);
  EXPECT_TRUE(cfg.hyper.allow_colocation);
  EXPECT_EQ(cfg.hyper.epsilon_decay, 0.93);
  ASSERT_EQ(cfg.experiments.size(), 2u);
  EXPECT_EQ(cfg.experiments[0].n_uavs, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(cfg.experiments[0].modes.size(), 2u);
  EXPECT_EQ(cfg.experiments[1].map, "dir/custom/field.map");
}

void expect_config_error(const std::string& text, const std::string& needle) {
  try {
    parse_run_config(text, "c.yaml");
    ADD_FAILURE() << "accepted:\n" << text;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << e.what();
  }
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
  expect_config_error("seeds: [1]\nbogus: 2\nexperiments:\n  - map: grove_5x5\n",
                      "c.yaml:2:");
  expect_config_error(
      "experiments:\n  - map: grove_5x5\n    uav: [2]\n", "c.yaml:3:");
  expect_config_error(
      "hyperparameters:\n  gamma: 1.5\nexperiments:\n  - map: grove_5x5\n",
      "c.yaml:2:");
  expect_config_error(
      "hyperparameters:\n  batch_size: many\nexperiments:\n  - map: x\n",
      "c.yaml:2:");
  expect_config_error(
      "experiments:\n  - map: grove_5x5\n    modes: [local, both]\n",
      "c.yaml:3:");
  expect_config_error("experiments:\n  - map: grove_5x5\n    uavs: [12]\n",
                      "c.yaml:3:");
  expect_config_error("episodes: 0\nexperiments:\n  - map: grove_5x5\n",
                      "c.yaml:1:");
  expect_config_error("seeds: [1\n", "c.yaml:");
  expect_config_error("seeds: [1]\n", "experiments");
}

TEST(ParseConfig, ShippedConfigsLoad) {
  const fs::path dir = fs::path(UAVCOVER_SOURCE_DIR) / "configs";
  int loaded = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".yaml") continue;
    const RunConfig cfg = load_run_config(entry.path().string());
    EXPECT_FALSE(cfg.experiments.empty()) << entry.path();
    for (const ExperimentEntry& e : cfg.experiments) {
      EXPECT_NO_THROW(load_map(e.map)) << e.map;
    }
    ++loaded;
  }
  EXPECT_GE(loaded, 3);
}

TEST(ParseConfig, UnreadableFile) {
  EXPECT_THROW(load_run_config("/nonexistent/run.yaml"), ConfigError);
}

TEST(CmdRun, MinimalConfigRowCount) {
  ScratchDir dir("rows");
  const std::string cfg = dir.file("c.yaml");
  write_text(cfg, small_config(dir.file("r.csv")));
  std::string out;
  ASSERT_EQ(run_main({"run", cfg}, &out), kExitOk);
  const auto lines = lines_of(read_text(dir.file("r.csv")));
  ASSERT_EQ(lines.size(), 32u);  // header, 30 episodes, summary
  EXPECT_EQ(lines[0],
            "map_id,n_uavs,mode,seed,episode,total_actions,covered,"
            "best_total_actions");
  EXPECT_EQ(lines[1].rfind("grove_5x5,1,local,1,0,", 0), 0u);
  EXPECT_EQ(lines[31].rfind("grove_5x5,1,local,1,best,", 0), 0u);
  EXPECT_NE(out.find("grove_5x5"), std::string::npos);
  EXPECT_NE(out.find("results: " + dir.file("r.csv")), std::string::npos);
}

TEST(CmdRun, MissingMapNamesPath) {
  ScratchDir dir("missing");
  const std::string cfg = dir.file("c.yaml");
  write_text(cfg, "experiments:\n  - map: nowhere.map\n");
  std::string err;
  EXPECT_EQ(run_main({"run", cfg}, nullptr, &err), kExitConfigError);
  EXPECT_NE(err.find(dir.file("nowhere.map")), std::string::npos) << err;
}

TEST(CmdRun, RepeatedRunsAreByteIdentical) {
  ScratchDir dir("repeat");
  const std::string cfg = dir.file("c.yaml");
  write_text(cfg, small_config("ignored.csv", true));
  const std::vector<std::string> common = {"run", cfg, "--seeds", "1,2",
                                           "--episodes", "5"};
  auto with_output = [&](const std::string& name) {
    auto args = common;
    args.push_back("-o");
    args.push_back(dir.file(name));
    return args;
  };
  ASSERT_EQ(run_main(with_output("a.csv")), kExitOk);
  auto parallel = with_output("b.csv");
  parallel.push_back("-j");
  parallel.push_back("2");
  ASSERT_EQ(run_main(parallel), kExitOk);
  const std::string a = read_text(dir.file("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read_text(dir.file("b.csv")));
  EXPECT_EQ(read_text(dir.file("a.trace.csv")),
            read_text(dir.file("b.trace.csv")));
  EXPECT_EQ(lines_of(a).size(), 1u + 2u * 6u);
}

TEST(CmdRun, OutputDirectoryFromEnvironment) {
  ScratchDir dir("env");
  const std::string cfg = dir.file("c.yaml");
  write_text(cfg, small_config("nested/r.csv"));
  const std::string target = dir.file("elsewhere");
  ::setenv(kOutputDirEnv, target.c_str(), 1);
  const int code = run_main({"run", cfg, "--episodes", "2"});
  ::unsetenv(kOutputDirEnv);
  ASSERT_EQ(code, kExitOk);
  EXPECT_TRUE(fs::exists(fs::path(target) / "r.csv"));
}

TEST(CmdRun, InvalidFlagValueIsConfigError) {
  ScratchDir dir("flag");
  const std::string cfg = dir.file("c.yaml");
  write_text(cfg, "experiments:\n  - map: grove_5x5\n");
  std::string err;
  EXPECT_EQ(run_main({"run", cfg, "--learning-rate", "-1"}, nullptr, &err),
            kExitConfigError);
  EXPECT_NE(err.find("learning"), std::string::npos) << err;
}

TEST(CmdRender, TracedBestEpisode) {
  ScratchDir dir("render");
  const std::string cfg = dir.file("c.yaml");
  const std::string csv = dir.file("r.csv");
  write_text(cfg, small_config(csv, true));
  ASSERT_EQ(run_main({"run", cfg, "--seeds", "1,2", "--episodes", "6"}),
            kExitOk);

  const auto lines = lines_of(read_text(csv));
  const GridMap map = load_map("grove_5x5");
  for (const std::string seed : {"1", "2"}) {
    std::string best;
    for (const std::string& l : lines) {
      const std::string prefix = "grove_5x5,1,local," + seed + ",best,";
      if (l.rfind(prefix, 0) == 0) best = l.substr(l.rfind(',') + 1);
    }
    ASSERT_FALSE(best.empty()) << "seed " << seed << " did not cover";

    std::string out;
    ASSERT_EQ(run_main({"render", csv, "--map", "grove_5x5", "--seed", seed},
                       &out),
              kExitOk);
    EXPECT_NE(out.find("actions=" + best + "\n"), std::string::npos) << out;
    EXPECT_EQ(out.find("·"), std::string::npos) << out;

    const auto drawn = lines_of(out);
    ASSERT_EQ(drawn.size(), 1u + 5u);
    for (int r = 0; r < map.rows(); ++r) {
      // Obstacles stay '#', whatever happened around them.
      std::size_t byte = 0;
      for (int c = 0; c < map.cols(); ++c) {
        const std::string& row = drawn[1 + static_cast<std::size_t>(r)];
        const bool obstacle = map.kind({r, c}) == CellKind::Obstacle;
        EXPECT_EQ(row[byte] == '#', obstacle) << "cell " << r << "," << c;
        // Step over one UTF-8 glyph.
        byte += (static_cast<unsigned char>(row[byte]) < 0x80) ? 1 : 3;
      }
    }
  }
}

TEST(CmdRender, Errors) {
  ScratchDir dir("render_err");
  const std::string cfg = dir.file("c.yaml");
  const std::string csv = dir.file("r.csv");
  write_text(cfg, small_config(csv));
  ASSERT_EQ(run_main({"run", cfg, "--episodes", "3"}), kExitOk);
  std::string err;
  EXPECT_EQ(run_main({"render", csv, "--map", "grove_5x5", "--seed", "1"},
                     nullptr, &err),
            kExitConfigError);
  EXPECT_NE(err.find("trace"), std::string::npos);

  ASSERT_EQ(run_main({"run", cfg, "--episodes", "3", "--trace"}), kExitOk);
  EXPECT_EQ(run_main({"render", csv, "--map", "grove_5x5", "--seed", "9"}),
            kExitConfigError);
  EXPECT_EQ(run_main({"render", csv, "--map", "corners_6x6", "--seed", "1"}),
            kExitConfigError);
  EXPECT_EQ(run_main({"render", csv, "--map", "grove_5x5", "--seed", "1",
                      "--mode", "global"}),
            kExitConfigError);
  EXPECT_EQ(run_main({"render", dir.file("absent.csv"), "--map", "grove_5x5",
                      "--seed", "1"}),
            kExitConfigError);

  // A results file that disagrees with its trace is a runtime error.
  std::string text = read_text(csv);
  const std::size_t last = text.rfind(',', text.size() - 2);
  text = text.substr(0, last + 1) + "1\n";
  write_text(csv, text);
  EXPECT_EQ(run_main({"render", csv, "--map", "grove_5x5", "--seed", "1"}),
            kExitRuntimeError);
}

TEST(RenderState, Glyphs) {
  const GridMap map = parse_map("..\n.#");
  SwarmState s = initial_state(map, 1);
  EXPECT_EQ(render_state(map, s), "1·\n·#\n");
  s = transition(map, s, 0, Action::South).first;
  EXPECT_EQ(render_state(map, s), "▪·\n1#\n");
}

TEST(CmdMaps, ListsBundledMaps) {
  std::string out;
  ASSERT_EQ(run_main({"maps"}, &out), kExitOk);
  const auto lines = lines_of(out);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_NE(lines[0].find("grove_5x5"), std::string::npos);
  EXPECT_NE(lines[0].find("5x5"), std::string::npos);
  EXPECT_NE(lines[0].find("21 free"), std::string::npos);
  EXPECT_NE(lines[0].find("obstacle islands"), std::string::npos);
  EXPECT_NE(lines[4].find("9x9"), std::string::npos);
  EXPECT_NE(lines[4].find("single large obstacle"), std::string::npos);
}

TEST(Help, ShowsDocumentedDefaults) {
  std::string out;
  EXPECT_EQ(run_main({"run", "--help"}, &out), kExitOk);
  for (const std::string expected :
       {"[default: 0.49]", "[default: 0.93]", "[default: 0.05]",
        "[default: 0.83]", "[default: 60]", "[default: 1013]",
        "[default: 30]", "[default: 16]"}) {
    EXPECT_NE(out.find(expected), std::string::npos) << expected;
  }
}

TEST(Arguments, ExitCodes) {
  EXPECT_EQ(run_main({}), kExitConfigError);
  EXPECT_EQ(run_main({"fly"}), kExitConfigError);
  EXPECT_EQ(run_main({"run"}), kExitConfigError);
  EXPECT_EQ(run_main({"run", "/nonexistent/c.yaml"}), kExitConfigError);
  EXPECT_EQ(run_main({"render", "r.csv", "--map", "grove_5x5"}),
            kExitConfigError);
  EXPECT_EQ(run_main({"render", "r.csv", "--map", "grove_5x5", "--seed", "1",
                      "--mode", "both"}),
            kExitConfigError);
}

}  // namespace
}  // namespace uavcover::cli
