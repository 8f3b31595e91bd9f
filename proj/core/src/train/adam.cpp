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

#include "salad/train/adam.hpp"

#include <cmath>

#include "salad/binary_io.hpp"
#include "salad/errors.hpp"

namespace salad::train {

void Adam::step(const std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads) {
  step(params, grads, config_.lr);
}

void Adam::step(const std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads, double lr) {
  if (params.size() != grads.size()) {
    throw DimensionError("optimizer: parameter and gradient counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i]->shape()) {
      throw DimensionError("optimizer: gradient shape mismatch for parameter " +
                           std::to_string(i));
    }
    for (double g : grads[i]->data()) {
      if (!std::isfinite(g)) {
        throw DivergenceError("non-finite gradient for parameter " +
                              std::to_string(i));
      }
    }
  }
  if (m_.empty()) {
    for (const Tensor* p : params) {
      m_.emplace_back(p->shape());
      v_.emplace_back(p->shape());
    }
  }
  if (m_.size() != params.size()) {
    throw DimensionError("optimizer: parameter count changed between steps");
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (m_[i].shape() != params[i]->shape()) {
      throw DimensionError("optimizer: parameter shape changed between steps");
    }
    auto p = params[i]->data();
    auto g = grads[i]->data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.epsilon);
    }
  }
}

std::string Adam::serialize() const {
  ByteWriter w;
  w.f64(config_.lr);
  w.f64(config_.beta1);
  w.f64(config_.beta2);
  w.f64(config_.epsilon);
  w.u64(t_);
  w.u32(static_cast<std::uint32_t>(m_.size()));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    w.u32(static_cast<std::uint32_t>(m_[i].rows()));
    w.u32(static_cast<std::uint32_t>(m_[i].cols()));
    w.f64s(m_[i].storage());
    w.f64s(v_[i].storage());
  }
  return w.take();
}

Adam Adam::deserialize(const std::string& bytes) {
  ByteReader<CheckpointError> r(bytes);
  Adam adam;
  adam.config_.lr = r.f64();
  adam.config_.beta1 = r.f64();
  adam.config_.beta2 = r.f64();
  adam.config_.epsilon = r.f64();
  adam.t_ = r.u64();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t rows = r.u32();
    const std::size_t cols = r.u32();
    adam.m_.emplace_back(tensor::Shape{rows, cols}, r.f64s(rows * cols));
    adam.v_.emplace_back(tensor::Shape{rows, cols}, r.f64s(rows * cols));
  }
  if (!r.done()) throw CheckpointError("trailing bytes in optimizer state");
  return adam;
}

}  // namespace salad::train
