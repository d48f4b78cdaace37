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

// Two-layer fully connected Q-function approximator trained with plain SGD.
//
// The network maps an observation vector to one raw (linear) Q-value per
// action. Training regresses the taken action's output onto a scalar target
// with squared error; untaken outputs receive no gradient.

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "uavcover/gridworld.hpp"

namespace uavcover {

using QValues = std::array<double, kNumActions>;

enum class Activation { ReLU, Linear };

struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;  // out_dim x in_dim, row-major
  std::vector<double> biases;   // out_dim
  Activation activation = Activation::Linear;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act);

  double& weight(std::size_t out_index, std::size_t in_index) {
    return weights[out_index * in_dim + in_index];
  }
  double weight(std::size_t out_index, std::size_t in_index) const {
    return weights[out_index * in_dim + in_index];
  }

  bool operator==(const DenseLayer&) const = default;
};

inline constexpr std::size_t kDefaultHiddenUnits = 1013;
// Plain SGD on raw rewards of order 10^2 diverges at 1e-3 with the default
// width; 1e-4 stays finite on the bundled maps.
inline constexpr double kDefaultLearningRate = 1e-4;

// Parameter gradients with the same shapes as the network.
struct Gradients {
  std::vector<double> hidden_weights;
  std::vector<double> hidden_biases;
  std::vector<double> output_weights;
  std::vector<double> output_biases;
};

class QNetwork {
 public:
  // Zero-initialized network.
  QNetwork(std::size_t input_dim, std::size_t hidden_units,
           double learning_rate);

  // Weights uniform in +-sqrt(1/fan_in), biases zero.
  QNetwork(std::size_t input_dim, std::size_t hidden_units,
           double learning_rate, std::mt19937_64& rng);

  std::size_t input_dim() const noexcept { return hidden_.in_dim; }
  std::size_t hidden_units() const noexcept { return hidden_.out_dim; }
  double learning_rate() const noexcept { return learning_rate_; }
  void set_learning_rate(double lr) noexcept { learning_rate_ = lr; }

  const DenseLayer& hidden_layer() const noexcept { return hidden_; }
  const DenseLayer& output_layer() const noexcept { return output_; }
  DenseLayer& hidden_layer() noexcept { return hidden_; }
  DenseLayer& output_layer() noexcept { return output_; }

  // Throws ShapeError on an input of the wrong length.
  QValues forward(std::span<const double> observation) const;

  // Squared error of the taken action's output against `target`.
  double loss(std::span<const double> observation, Action action,
              double target) const;

  // Backpropagated gradient of loss() with respect to every parameter.
  Gradients gradient(std::span<const double> observation, Action action,
                     double target) const;

  // One SGD step on loss(); returns the loss at the updated parameters.
  // Throws NumericalError when the residual or result is not finite.
  double train_step(std::span<const double> observation, Action action,
                    double target);

  bool operator==(const QNetwork&) const = default;

 private:
  struct HiddenPass {
    std::vector<double> activations;
    QValues q{};
  };
  HiddenPass run(std::span<const double> observation) const;
  void check_shape(std::span<const double> observation) const;

  DenseLayer hidden_;
  DenseLayer output_;
  double learning_rate_;
};

// Network sized for a rows x cols map: 3*rows*cols inputs, 4 outputs.
QNetwork init_network(int rows, int cols, std::mt19937_64& rng,
                      std::size_t hidden_units = kDefaultHiddenUnits,
                      double learning_rate = kDefaultLearningRate);

// Probabilities from Q-values, computed with max subtraction.
QValues softmax_policy_view(const QValues& qvalues);

// Lowest action code among the maxima.
Action greedy_action(const QValues& qvalues) noexcept;

// Text snapshot:
//   uavcover-qnet 1
//   learning_rate <lr>
//   layer <out> <in> relu|linear
//   <out*in weights, row-major> <out biases>
//   (second layer likewise)
// Values are written with 17 significant digits so reading restores the
// parameters exactly.
void save_snapshot(const QNetwork& net, std::ostream& out);
QNetwork load_snapshot(std::istream& in);

}  // namespace uavcover
