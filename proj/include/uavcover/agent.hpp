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

// Q-Learning controller for the swarm: epsilon-greedy selection, Bellman
// targets, FIFO experience replay and the local/global network wiring.

#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <string_view>
#include <vector>

#include "uavcover/densenet.hpp"
#include "uavcover/gridworld.hpp"

namespace uavcover {

// max(minimum, initial * decay^episode).
struct EpsilonSchedule {
  double initial = 0.49;
  double decay = 0.93;
  double minimum = 0.05;

  double value(int episode) const;
};

struct Experience {
  std::vector<double> observation;
  Action action = Action::North;
  double reward = 0.0;
  std::vector<double> next_observation;
  bool terminal = false;
  std::size_t uav = 0;  // which UAV produced it
};

inline constexpr std::size_t kDefaultMemoryCapacity = 60;

// Bounded FIFO: pushing into a full memory evicts the oldest entry.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = kDefaultMemoryCapacity);

  void push(Experience exp);

  std::size_t size() const noexcept { return buffer_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return buffer_.empty(); }
  const Experience& operator[](std::size_t i) const { return buffer_[i]; }
  auto begin() const noexcept { return buffer_.begin(); }
  auto end() const noexcept { return buffer_.end(); }

 private:
  std::deque<Experience> buffer_;
  std::size_t capacity_;
};

enum class ControllerMode { Local, Global };

std::string_view mode_name(ControllerMode m) noexcept;

struct ControllerConfig {
  ControllerMode mode = ControllerMode::Local;
  double gamma = 0.83;
  double learning_rate = kDefaultLearningRate;
  std::size_t batch_size = 16;
  std::size_t memory_capacity = kDefaultMemoryCapacity;
  std::size_t hidden_units = kDefaultHiddenUnits;
};

// Local mode owns one network and one memory per UAV; Global mode shares a
// single network and a single memory across the swarm.
class Controller {
 public:
  // Networks are initialized from `rng` in UAV order.
  Controller(const ControllerConfig& config, const GridMap& map,
             std::size_t n_uavs, std::mt19937_64& rng);

  const ControllerConfig& config() const noexcept { return config_; }
  std::size_t uav_count() const noexcept { return n_uavs_; }
  std::size_t network_count() const noexcept { return networks_.size(); }

  QNetwork& network_for(std::size_t uav);
  const QNetwork& network_for(std::size_t uav) const;
  ReplayMemory& memory_for(std::size_t uav);
  const ReplayMemory& memory_for(std::size_t uav) const;

  // Appends to the UAV's own memory (Local) or to the shared one (Global).
  void record(std::size_t uav, Experience exp);

  // Replays a batch from the UAV's memory into the UAV's network.
  double train(std::size_t uav, std::mt19937_64& rng);

 private:
  std::size_t slot(std::size_t uav) const;

  ControllerConfig config_;
  std::size_t n_uavs_;
  std::vector<QNetwork> networks_;
  std::vector<ReplayMemory> memories_;
};

// Uniform random action with probability epsilon, otherwise greedy with
// ties going to the lowest action code.
Action select_action(const QValues& qvalues, double epsilon,
                     std::mt19937_64& rng);

double bellman_target(double reward, double gamma, const QValues& next_qvalues,
                      bool terminal);

// Samples min(batch_size, |memory|) entries without replacement and applies
// one train_step per entry against a freshly computed Bellman target.
// Returns the mean post-step loss. Throws ContractViolation on an empty
// memory.
double train_from_memory(const ReplayMemory& memory, QNetwork& net,
                         const ControllerConfig& config,
                         std::mt19937_64& rng);

// One episode's environment: the map, the evolving swarm state and the
// action budget shared by the whole swarm.
struct SwarmEnv {
  const GridMap* map = nullptr;
  SwarmState state;
  TransitionRules rules;
  int step_budget = 0;

  bool budget_exhausted() const noexcept {
    return state.global_step >= step_budget;
  }
};

struct StepResult {
  std::vector<Experience> experiences;
  std::vector<MoveOutcome> outcomes;
  bool done = false;
};

// Lets every UAV act once in index order. Stops early as soon as a move
// completes coverage or spends the last action of the budget.
StepResult step_swarm(SwarmEnv& env, Controller& controller, double epsilon,
                      std::mt19937_64& rng);

}  // namespace uavcover
