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

#ifndef SALAD_TESTS_TINY_MODEL_HPP
#define SALAD_TESTS_TINY_MODEL_HPP

#include <vector>

#include "gradcheck.hpp"
#include "salad/losses/losses.hpp"
#include "salad/nets/model.hpp"

namespace salad::testing {

// Width <= 8 networks over 6-pixel observations with smooth activations.
inline nets::NetworkSpecs tiny_specs() {
  nets::NetworkSpecs s;
  s.encoder.widths = {6, 5, 2};
  s.encoder.hidden = nets::Activation::kTanh;
  s.dynamics.widths = {3, 6, 2};
  s.dynamics.hidden = nets::Activation::kTanh;
  s.barrier.widths = {2, 8, 4, 1};
  s.barrier.hidden = nets::Activation::kTanh;
  s.policy.widths = {2, 4, 1};
  s.policy.hidden = nets::Activation::kTanh;
  s.policy.output = nets::OutputActivation::kTanhScaled;
  s.policy.out_low = -2.0;
  s.policy.out_high = 2.0;
  return s;
}

// Online and target parameters differ so the frozen copy is observable.
inline nets::ParamStore tiny_params(std::uint64_t seed) {
  nets::ParamStore p(tiny_specs(), 0.9, seed);
  Rng rng(seed + 100);
  for (Tensor* t : p.online.parameters()) {
    for (double& v : t->data()) v += uniform(rng, -0.3, 0.3);
  }
  return p;
}

inline losses::Batch tiny_batch(std::uint64_t seed) {
  Rng rng(seed);
  losses::Batch b;
  b.obs_safe = random_matrix(3, 6, rng, 0.0, 1.0);
  b.obs_unsafe = random_matrix(3, 6, rng, 0.0, 1.0);
  b.obs = random_matrix(4, 6, rng, 0.0, 1.0);
  b.actions = random_matrix(4, 1, rng, -2.0, 2.0);
  b.next_obs = random_matrix(4, 6, rng, 0.0, 1.0);
  return b;
}

inline std::vector<Tensor> online_values(const nets::ParamStore& p) {
  std::vector<Tensor> out;
  for (const Tensor* t : p.online.parameters()) out.push_back(*t);
  return out;
}

// Rebuilds BoundNetworks from leaves ordered like Networks::parameters().
inline losses::BoundNetworks bind_leaves(const nets::ParamStore& p,
                                         const std::vector<Var>& leaves) {
  losses::BoundNetworks out;
  std::size_t k = 0;
  auto take = [&](const nets::Mlp& net, nets::MlpVars& vars) {
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
      vars.weights.push_back(leaves[k++]);
      vars.biases.push_back(leaves[k++]);
    }
  };
  take(p.online.encoder, out.encoder);
  take(p.online.dynamics, out.dynamics);
  take(p.online.barrier, out.barrier);
  take(p.online.policy, out.policy);
  return out;
}

}  // namespace salad::testing

#endif  // SALAD_TESTS_TINY_MODEL_HPP
