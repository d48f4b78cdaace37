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

#include "uavcover/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uavcover/errors.hpp"

namespace uavcover {

double EpsilonSchedule::value(int episode) const {
  return std::max(minimum, initial * std::pow(decay, episode));
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ContractViolation("memory capacity must be > 0");
}

void ReplayMemory::push(Experience exp) {
  if (buffer_.size() == capacity_) buffer_.pop_front();
  buffer_.push_back(std::move(exp));
}

std::string_view mode_name(ControllerMode m) noexcept {
  return m == ControllerMode::Local ? "local" : "global";
}

Controller::Controller(const ControllerConfig& config, const GridMap& map,
                       std::size_t n_uavs, std::mt19937_64& rng)
    : config_(config), n_uavs_(n_uavs) {
  if (n_uavs == 0) throw ContractViolation("controller needs at least 1 UAV");
  const std::size_t count = config.mode == ControllerMode::Local ? n_uavs : 1;
  networks_.reserve(count);
  memories_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    networks_.push_back(init_network(map.rows(), map.cols(), rng,
                                     config.hidden_units,
                                     config.learning_rate));
    memories_.emplace_back(config.memory_capacity);
  }
}

std::size_t Controller::slot(std::size_t uav) const {
  if (uav >= n_uavs_) {
    throw ContractViolation("UAV index " + std::to_string(uav) +
                            " out of range");
  }
  return config_.mode == ControllerMode::Local ? uav : 0;
}

QNetwork& Controller::network_for(std::size_t uav) {
  return networks_[slot(uav)];
}
const QNetwork& Controller::network_for(std::size_t uav) const {
  return networks_[slot(uav)];
}
ReplayMemory& Controller::memory_for(std::size_t uav) {
  return memories_[slot(uav)];
}
const ReplayMemory& Controller::memory_for(std::size_t uav) const {
  return memories_[slot(uav)];
}

void Controller::record(std::size_t uav, Experience exp) {
  exp.uav = uav;
  memory_for(uav).push(std::move(exp));
}

double Controller::train(std::size_t uav, std::mt19937_64& rng) {
  return train_from_memory(memory_for(uav), network_for(uav), config_, rng);
}

Action select_action(const QValues& qvalues, double epsilon,
                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, kNumActions - 1);
    return static_cast<Action>(pick(rng));
  }
  return greedy_action(qvalues);
}

double bellman_target(double reward, double gamma, const QValues& next_qvalues,
                      bool terminal) {
  if (terminal) return reward;
  return reward +
         gamma * *std::max_element(next_qvalues.begin(), next_qvalues.end());
}

double train_from_memory(const ReplayMemory& memory, QNetwork& net,
                         const ControllerConfig& config,
                         std::mt19937_64& rng) {
  if (memory.empty()) throw ContractViolation("cannot train from empty memory");
  const std::size_t batch = std::min(config.batch_size, memory.size());

  // Partial Fisher-Yates: the first `batch` slots become the sample.
  std::vector<std::size_t> order(memory.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < batch; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const Experience& exp = memory[order[i]];
    double target = exp.reward;
    if (!exp.terminal) {
      target = bellman_target(exp.reward, config.gamma,
                              net.forward(exp.next_observation), false);
    }
    total += net.train_step(exp.observation, exp.action, target);
  }
  return total / static_cast<double>(batch);
}

StepResult step_swarm(SwarmEnv& env, Controller& controller, double epsilon,
                      std::mt19937_64& rng) {
  StepResult result;
  const GridMap& map = *env.map;
  for (std::size_t uav = 0; uav < env.state.uav_count(); ++uav) {
    std::vector<double> obs = encode_observation(map, env.state);
    const QValues q = controller.network_for(uav).forward(obs);
    const Action action = select_action(q, epsilon, rng);

    auto [next, outcome] = transition(map, env.state, uav, action, env.rules);
    env.state = std::move(next);

    Experience exp;
    exp.observation = std::move(obs);
    exp.action = action;
    exp.reward = outcome.reward;
    exp.next_observation = encode_observation(map, env.state);
    exp.terminal =
        is_coverage_complete(map, env.state) || env.budget_exhausted();
    exp.uav = uav;

    const bool done = exp.terminal;
    controller.record(uav, exp);
    controller.train(uav, rng);

    result.experiences.push_back(std::move(exp));
    result.outcomes.push_back(outcome);
    if (done) {
      result.done = true;
      break;
    }
  }
  return result;
}

}  // namespace uavcover
