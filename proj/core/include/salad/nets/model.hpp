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

#ifndef SALAD_NETS_MODEL_HPP
#define SALAD_NETS_MODEL_HPP

#include <cstdint>
#include <vector>

#include "salad/nets/mlp.hpp"

namespace salad::nets {

// Layout of the four networks.
struct NetworkSpecs {
  MlpSpec encoder;   // frames -> z
  MlpSpec dynamics;  // [z, a] -> z'
  MlpSpec barrier;   // z -> B(z)
  MlpSpec policy;    // z -> a, squashed into the action interval

  void validate() const;
  std::size_t latent_dim() const { return encoder.output_dim(); }
  std::size_t action_dim() const { return policy.output_dim(); }

  friend bool operator==(const NetworkSpecs&, const NetworkSpecs&) = default;
};

struct Networks {
  Mlp encoder;
  Mlp dynamics;
  Mlp barrier;
  Mlp policy;

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
};

// Online parameters, their slow Polyak copy and the LMI multipliers.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const NetworkSpecs& specs, double rho, std::uint64_t seed);

  Networks online;
  Networks target;
  // Lambda = exp(log_lambda), one entry per hidden neuron of the barrier.
  Tensor log_lambda;

  double rho() const { return rho_; }
  void set_rho(double rho);
  const NetworkSpecs& specs() const { return specs_; }

  Tensor lambda() const;

  // target <- rho * target + (1 - rho) * online. rho in [0, 1).
  void polyak_update();
  void polyak_update(double rho);

  // target <- online.
  void sync_target();

 private:
  NetworkSpecs specs_;
  double rho_ = 0.995;
};

// Batched evaluation helpers. Rows are samples.
Tensor encode(const Mlp& encoder, const Tensor& frames);
Tensor latent_step(const Mlp& dynamics, const Tensor& z, const Tensor& a);
Tensor barrier(const Mlp& barrier_net, const Tensor& z);
Tensor policy(const Mlp& policy_net, const Tensor& z);

// Column concatenation of two batches with equal row counts.
Tensor concat_cols(const Tensor& a, const Tensor& b);

}  // namespace salad::nets

#endif  // SALAD_NETS_MODEL_HPP
