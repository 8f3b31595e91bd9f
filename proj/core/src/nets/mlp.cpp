/*
 Copyright 2026 The salad Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "salad/nets/mlp.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "salad/errors.hpp"
#include "salad/tensor/ops.hpp"

namespace salad::nets {
namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::string to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

std::string to_string(OutputActivation a) {
  return a == OutputActivation::kLinear ? "linear" : "tanh-scaled";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("", "unknown activation '" + name + "'");
}

void MlpSpec::validate() const {
  if (widths.size() < 3) {
    throw DimensionError("network needs at least one hidden layer");
  }
  for (std::size_t w : widths) {
    if (w == 0) throw DimensionError("network layer width must be >= 1");
  }
  if (output == OutputActivation::kTanhScaled && !(out_low < out_high)) {
    throw DimensionError("tanh-scaled output needs out_low < out_high");
  }
}

std::size_t MlpSpec::hidden_neurons() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < widths.size(); ++i) n += widths[i];
  return n;
}

std::pair<double, double> MlpSpec::slopes() const { return {0.0, 1.0}; }

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  for (std::size_t i = 0; i + 1 < spec_.widths.size(); ++i) {
    layers_.push_back(Layer{Tensor({spec_.widths[i], spec_.widths[i + 1]}),
                            Tensor({1, spec_.widths[i + 1]})});
  }
}

Mlp Mlp::initialized(MlpSpec spec, Rng& rng) {
  Mlp net(std::move(spec));
  for (Layer& layer : net.layers_) {
    const double fan_in = static_cast<double>(layer.weight.rows());
    const double fan_out = static_cast<double>(layer.weight.cols());
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : layer.weight.data()) w = uniform(rng, -bound, bound);
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

Tensor Mlp::forward(const Tensor& x) const {
  if (x.cols() != spec_.input_dim()) {
    throw DimensionError("network input has " + std::to_string(x.cols()) +
                         " columns, expected " +
                         std::to_string(spec_.input_dim()));
  }
  const auto rows = static_cast<Eigen::Index>(x.rows());
  RowMat h = Eigen::Map<const RowMat>(x.data().data(), rows,
                                      static_cast<Eigen::Index>(x.cols()));
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    Eigen::Map<const RowMat> w(layer.weight.data().data(),
                               static_cast<Eigen::Index>(layer.weight.rows()),
                               static_cast<Eigen::Index>(layer.weight.cols()));
    Eigen::Map<const Eigen::RowVectorXd> b(
        layer.bias.data().data(), static_cast<Eigen::Index>(layer.bias.size()));
    RowMat next = h * w;
    next.rowwise() += b;
    const bool last = i + 1 == layers_.size();
    if (!last) {
      if (spec_.hidden == Activation::kRelu) {
        next = next.cwiseMax(0.0);
      } else {
        next = next.array().tanh();
      }
    } else if (spec_.output == OutputActivation::kTanhScaled) {
      const double mid = 0.5 * (spec_.out_high + spec_.out_low);
      const double half = 0.5 * (spec_.out_high - spec_.out_low);
      next = (next.array().tanh() * half + mid).matrix();
    }
    h = std::move(next);
  }
  Tensor out({static_cast<std::size_t>(h.rows()),
              static_cast<std::size_t>(h.cols())});
  Eigen::Map<RowMat>(out.data().data(), h.rows(), h.cols()) = h;
  return out;
}

MlpVars Mlp::bind(Tape& tape, bool requires_grad) const {
  MlpVars vars;
  for (const Layer& layer : layers_) {
    vars.weights.push_back(tape.leaf(layer.weight, requires_grad));
    vars.biases.push_back(tape.leaf(layer.bias, requires_grad));
  }
  return vars;
}

std::vector<Tensor*> Mlp::parameters() {
  std::vector<Tensor*> out;
  for (Layer& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const Tensor*> Mlp::parameters() const {
  std::vector<const Tensor*> out;
  for (const Layer& layer : layers_) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

Var forward(const MlpSpec& spec, const MlpVars& vars, Var x) {
  if (x.value().cols() != spec.input_dim()) {
    throw DimensionError("network input has " +
                         std::to_string(x.value().cols()) +
                         " columns, expected " +
                         std::to_string(spec.input_dim()));
  }
  Var h = x;
  const std::size_t n = vars.weights.size();
  for (std::size_t i = 0; i < n; ++i) {
    h = tensor::add_row(tensor::matmul(h, vars.weights[i]), vars.biases[i]);
    if (i + 1 < n) {
      h = spec.hidden == Activation::kRelu ? tensor::relu(h) : tensor::tanh(h);
    } else if (spec.output == OutputActivation::kTanhScaled) {
      const double mid = 0.5 * (spec.out_high + spec.out_low);
      const double half = 0.5 * (spec.out_high - spec.out_low);
      h = tensor::add_scalar(tensor::scale(tensor::tanh(h), half), mid);
    }
  }
  return h;
}

}  // namespace salad::nets
