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

#ifndef SALAD_TRAIN_ADAM_HPP
#define SALAD_TRAIN_ADAM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "salad/tensor/tensor.hpp"

namespace salad::train {

using tensor::Tensor;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive moment estimation with bias-corrected moments. Holds only the
// moment state; parameters are passed to every step in a fixed order.
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamConfig config) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }
  std::uint64_t steps() const { return t_; }

  // Throws DivergenceError on a non-finite gradient (parameters untouched)
  // and DimensionError when shapes change between steps.
  void step(const std::vector<Tensor*>& params,
            const std::vector<const Tensor*>& grads);
  void step(const std::vector<Tensor*>& params,
            const std::vector<const Tensor*>& grads, double lr);

  std::string serialize() const;
  static Adam deserialize(const std::string& bytes);

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace salad::train

#endif  // SALAD_TRAIN_ADAM_HPP
