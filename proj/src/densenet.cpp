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

#include "uavcover/densenet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "uavcover/errors.hpp"

namespace uavcover {
namespace {

// Observations are mostly zeros (0/1 channels), so the hidden layer walks
// only the nonzero inputs.
std::vector<std::size_t> nonzero_indices(std::span<const double> x) {
  std::vector<std::size_t> nz;
  nz.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) nz.push_back(j);
  }
  return nz;
}

const char* activation_name(Activation a) {
  return a == Activation::ReLU ? "relu" : "linear";
}

}  // namespace

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act)
    : in_dim(in), out_dim(out), weights(in * out, 0.0), biases(out, 0.0),
      activation(act) {}

QNetwork::QNetwork(std::size_t input_dim, std::size_t hidden_units,
                   double learning_rate)
    : hidden_(input_dim, hidden_units, Activation::ReLU),
      output_(hidden_units, kNumActions, Activation::Linear),
      learning_rate_(learning_rate) {
  if (input_dim == 0 || hidden_units == 0) {
    throw ShapeError("network dimensions must be positive");
  }
}

QNetwork::QNetwork(std::size_t input_dim, std::size_t hidden_units,
                   double learning_rate, std::mt19937_64& rng)
    : QNetwork(input_dim, hidden_units, learning_rate) {
  auto fill = [&rng](DenseLayer& layer) {
    const double bound = std::sqrt(1.0 / static_cast<double>(layer.in_dim));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : layer.weights) w = dist(rng);
  };
  fill(hidden_);
  fill(output_);
}

void QNetwork::check_shape(std::span<const double> observation) const {
  if (observation.size() != hidden_.in_dim) {
    throw ShapeError("observation has " + std::to_string(observation.size()) +
                     " entries, network expects " +
                     std::to_string(hidden_.in_dim));
  }
}

QNetwork::HiddenPass QNetwork::run(std::span<const double> observation) const {
  check_shape(observation);
  const auto nz = nonzero_indices(observation);
  HiddenPass pass;
  pass.activations.resize(hidden_.out_dim);
  for (std::size_t h = 0; h < hidden_.out_dim; ++h) {
    const double* row = &hidden_.weights[h * hidden_.in_dim];
    double z = hidden_.biases[h];
    for (std::size_t j : nz) z += row[j] * observation[j];
    pass.activations[h] = z > 0.0 ? z : 0.0;
  }
  for (std::size_t a = 0; a < kNumActions; ++a) {
    const double* row = &output_.weights[a * output_.in_dim];
    double q = output_.biases[a];
    for (std::size_t h = 0; h < output_.in_dim; ++h) {
      q += row[h] * pass.activations[h];
    }
    pass.q[a] = q;
  }
  return pass;
}

QValues QNetwork::forward(std::span<const double> observation) const {
  return run(observation).q;
}

double QNetwork::loss(std::span<const double> observation, Action action,
                      double target) const {
  const double r =
      forward(observation)[static_cast<std::size_t>(action_code(action))] -
      target;
  return r * r;
}

Gradients QNetwork::gradient(std::span<const double> observation,
                             Action action, double target) const {
  const HiddenPass pass = run(observation);
  const auto a = static_cast<std::size_t>(action_code(action));
  const double delta = 2.0 * (pass.q[a] - target);

  Gradients g;
  g.output_weights.assign(output_.weights.size(), 0.0);
  g.output_biases.assign(output_.biases.size(), 0.0);
  g.hidden_weights.assign(hidden_.weights.size(), 0.0);
  g.hidden_biases.assign(hidden_.biases.size(), 0.0);

  g.output_biases[a] = delta;
  for (std::size_t h = 0; h < hidden_.out_dim; ++h) {
    g.output_weights[a * output_.in_dim + h] = delta * pass.activations[h];
    if (pass.activations[h] <= 0.0) continue;
    const double dh = delta * output_.weight(a, h);
    g.hidden_biases[h] = dh;
    for (std::size_t j = 0; j < hidden_.in_dim; ++j) {
      g.hidden_weights[h * hidden_.in_dim + j] = dh * observation[j];
    }
  }
  return g;
}

double QNetwork::train_step(std::span<const double> observation,
                            Action action, double target) {
  const HiddenPass pass = run(observation);
  const auto a = static_cast<std::size_t>(action_code(action));
  const double delta = 2.0 * (pass.q[a] - target);
  if (!std::isfinite(delta)) {
    throw NumericalError("non-finite gradient in train_step");
  }
  const double step = learning_rate_ * delta;

  if (step != 0.0) {
    const auto nz = nonzero_indices(observation);
    double* out_row = &output_.weights[a * output_.in_dim];
    for (std::size_t h = 0; h < hidden_.out_dim; ++h) {
      if (pass.activations[h] <= 0.0) continue;
      // Hidden update uses the output weight from before this step.
      const double hidden_step = step * out_row[h];
      double* row = &hidden_.weights[h * hidden_.in_dim];
      for (std::size_t j : nz) row[j] -= hidden_step * observation[j];
      hidden_.biases[h] -= hidden_step;
      out_row[h] -= step * pass.activations[h];
    }
    output_.biases[a] -= step;
  }

  const double updated = loss(observation, action, target);
  if (!std::isfinite(updated)) {
    throw NumericalError("non-finite loss after train_step");
  }
  return updated;
}

QNetwork init_network(int rows, int cols, std::mt19937_64& rng,
                      std::size_t hidden_units, double learning_rate) {
  if (rows < 2 || cols < 2) {
    throw ShapeError("network map dimensions must be at least 2x2");
  }
  const auto input = static_cast<std::size_t>(3 * rows * cols);
  return QNetwork(input, hidden_units, learning_rate, rng);
}

QValues softmax_policy_view(const QValues& qvalues) {
  const double peak = *std::max_element(qvalues.begin(), qvalues.end());
  QValues p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(qvalues[i] - peak);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

Action greedy_action(const QValues& qvalues) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < qvalues.size(); ++i) {
    if (qvalues[i] > qvalues[best]) best = i;
  }
  return static_cast<Action>(best);
}

void save_snapshot(const QNetwork& net, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "uavcover-qnet 1\n";
  out << "learning_rate " << net.learning_rate() << '\n';
  for (const DenseLayer* layer : {&net.hidden_layer(), &net.output_layer()}) {
    out << "layer " << layer->out_dim << ' ' << layer->in_dim << ' '
        << activation_name(layer->activation) << '\n';
    for (std::size_t o = 0; o < layer->out_dim; ++o) {
      for (std::size_t i = 0; i < layer->in_dim; ++i) {
        out << (i ? " " : "") << layer->weight(o, i);
      }
      out << '\n';
    }
    for (std::size_t o = 0; o < layer->out_dim; ++o) {
      out << (o ? " " : "") << layer->biases[o];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

QNetwork load_snapshot(std::istream& in) {
  auto fail = [](const std::string& what) -> ShapeError {
    return ShapeError("bad network snapshot: " + what);
  };
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "uavcover-qnet" || version != 1) {
    throw fail("missing header");
  }
  double lr = 0.0;
  if (!(in >> word >> lr) || word != "learning_rate") {
    throw fail("missing learning_rate");
  }
  DenseLayer layers[2];
  for (DenseLayer& layer : layers) {
    std::size_t out_dim = 0;
    std::size_t in_dim = 0;
    std::string act;
    if (!(in >> word >> out_dim >> in_dim >> act) || word != "layer") {
      throw fail("missing layer header");
    }
    if (act != "relu" && act != "linear") throw fail("unknown activation");
    layer = DenseLayer(in_dim, out_dim,
                       act == "relu" ? Activation::ReLU : Activation::Linear);
    for (double& w : layer.weights) {
      if (!(in >> w)) throw fail("truncated weights");
    }
    for (double& b : layer.biases) {
      if (!(in >> b)) throw fail("truncated biases");
    }
  }
  if (layers[0].activation != Activation::ReLU ||
      layers[1].activation != Activation::Linear ||
      layers[1].out_dim != kNumActions ||
      layers[1].in_dim != layers[0].out_dim) {
    throw fail("layer shapes do not form a Q-network");
  }
  QNetwork net(layers[0].in_dim, layers[0].out_dim, lr);
  net.hidden_layer() = std::move(layers[0]);
  net.output_layer() = std::move(layers[1]);
  return net;
}

}  // namespace uavcover
