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

#include "salad/nets/model.hpp"

#include <utility>

#include <cmath>

#include "salad/errors.hpp"

namespace salad::nets {

void NetworkSpecs::validate() const {
  encoder.validate();
  dynamics.validate();
  barrier.validate();
  policy.validate();
  const std::size_t k = encoder.output_dim();
  if (dynamics.input_dim() != k + policy.output_dim() ||
      dynamics.output_dim() != k) {
    throw DimensionError("dynamics network must map [z, a] to z");
  }
  if (barrier.input_dim() != k || barrier.output_dim() != 1) {
    throw DimensionError("barrier network must map z to a scalar");
  }
  if (policy.input_dim() != k) {
    throw DimensionError("policy network must read the latent state");
  }
  if (policy.output != OutputActivation::kTanhScaled) {
    throw DimensionError("policy output must be squashed into the action set");
  }
}

std::vector<Tensor*> Networks::parameters() {
  std::vector<Tensor*> out;
  for (Mlp* net : {&encoder, &dynamics, &barrier, &policy}) {
    for (Tensor* p : net->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<const Tensor*> Networks::parameters() const {
  std::vector<const Tensor*> out;
  for (const Mlp* net : {&encoder, &dynamics, &barrier, &policy}) {
    for (const Tensor* p : net->parameters()) out.push_back(p);
  }
  return out;
}

ParamStore::ParamStore(const NetworkSpecs& specs, double rho,
                       std::uint64_t seed)
    : specs_(specs) {
  specs_.validate();
  set_rho(rho);
  Rng rng(seed);
  online.encoder = Mlp::initialized(specs_.encoder, rng);
  online.dynamics = Mlp::initialized(specs_.dynamics, rng);
  online.barrier = Mlp::initialized(specs_.barrier, rng);
  online.policy = Mlp::initialized(specs_.policy, rng);
  target = online;
  log_lambda = Tensor({1, specs_.barrier.hidden_neurons()});
}

void ParamStore::set_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw ConfigError("polyak_rho", "must lie in [0, 1)");
  }
  rho_ = rho;
}

Tensor ParamStore::lambda() const {
  Tensor out = log_lambda;
  for (double& v : out.data()) v = std::exp(v);
  return out;
}

void ParamStore::polyak_update() { polyak_update(rho_); }

void ParamStore::polyak_update(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw ConfigError("polyak_rho", "must lie in [0, 1)");
  }
  std::vector<Tensor*> dst = target.parameters();
  std::vector<const Tensor*> src = std::as_const(online).parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto d = dst[i]->data();
    auto s = src[i]->data();
    for (std::size_t j = 0; j < d.size(); ++j) {
      d[j] = rho * d[j] + (1.0 - rho) * s[j];
    }
  }
}

void ParamStore::sync_target() { target = online; }

Tensor encode(const Mlp& encoder, const Tensor& frames) {
  return encoder.forward(frames);
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_cols: row counts differ");
  }
  const std::size_t ca = a.cols();
  const std::size_t cb = b.cols();
  Tensor out({a.rows(), ca + cb});
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < ca; ++c) out.at(r, c) = a[r * ca + c];
    for (std::size_t c = 0; c < cb; ++c) out.at(r, ca + c) = b[r * cb + c];
  }
  return out;
}

Tensor latent_step(const Mlp& dynamics, const Tensor& z, const Tensor& a) {
  return dynamics.forward(concat_cols(z, a));
}

Tensor barrier(const Mlp& barrier_net, const Tensor& z) {
  return barrier_net.forward(z);
}

Tensor policy(const Mlp& policy_net, const Tensor& z) {
  return policy_net.forward(z);
}

}  // namespace salad::nets
