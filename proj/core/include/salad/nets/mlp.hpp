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

#ifndef SALAD_NETS_MLP_HPP
#define SALAD_NETS_MLP_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "salad/random.hpp"
#include "salad/tensor/tape.hpp"
#include "salad/tensor/tensor.hpp"

namespace salad::nets {

using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

enum class Activation { kRelu, kTanh };
enum class OutputActivation { kLinear, kTanhScaled };

std::string to_string(Activation a);
std::string to_string(OutputActivation a);
Activation parse_activation(const std::string& name);

// Feed-forward network layout. widths = {input, hidden..., output}.
struct MlpSpec {
  std::vector<std::size_t> widths;
  Activation hidden = Activation::kRelu;
  OutputActivation output = OutputActivation::kLinear;
  // Range of a kTanhScaled output.
  double out_low = -1.0;
  double out_high = 1.0;

  void validate() const;
  std::size_t input_dim() const { return widths.front(); }
  std::size_t output_dim() const { return widths.back(); }
  std::size_t hidden_neurons() const;

  // Minimum and maximum slope (alpha, beta) of the hidden activation; both
  // relu and tanh lie in the sector [0, 1].
  std::pair<double, double> slopes() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

// y = x W + b with W stored in x out.
struct Layer {
  Tensor weight;
  Tensor bias;
};

// Tape handles for the parameters of one network.
struct MlpVars {
  std::vector<Var> weights;
  std::vector<Var> biases;
};

class Mlp {
 public:
  Mlp() = default;
  // Zero weights and biases.
  explicit Mlp(MlpSpec spec);

  // Uniform Glorot-style initialization, zero biases.
  static Mlp initialized(MlpSpec spec, Rng& rng);

  const MlpSpec& spec() const { return spec_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t parameter_count() const;

  // Rows of x are samples.
  Tensor forward(const Tensor& x) const;

  MlpVars bind(Tape& tape, bool requires_grad) const;

  // Weights and biases interleaved, layer by layer.
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;

 private:
  MlpSpec spec_;
  std::vector<Layer> layers_;
};

Var forward(const MlpSpec& spec, const MlpVars& vars, Var x);

}  // namespace salad::nets

#endif  // SALAD_NETS_MLP_HPP
