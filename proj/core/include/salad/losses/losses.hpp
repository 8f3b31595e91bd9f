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

#ifndef SALAD_LOSSES_LOSSES_HPP
#define SALAD_LOSSES_LOSSES_HPP

#include <functional>

#include "salad/nets/model.hpp"
#include "salad/tensor/ops.hpp"

namespace salad::losses {

using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

struct LossWeights {
  // Safe, unsafe and consistency terms of the latent loss.
  double xi1 = 1.0;
  double xi2 = 1.0;
  double xi3 = 1.0;
  // Synthesis, latent and performance terms of the total.
  double lambda1 = 1.0;
  double lambda2 = 0.5;
  double lambda3 = 0.1;

  // Throws ConfigError naming the first non-positive weight.
  void validate() const;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

// Term-level losses over barrier values (n x 1) and latents (n x d).

// sum max(0, B + psi) over safe samples.
Var safe_term(Var b_safe, double psi);
// sum max(0, -B + psi) over unsafe samples.
Var unsafe_term(Var b_unsafe, double psi);
// sum ||target - predicted||^2; target is treated as a constant.
Var consistency_term(Var predicted, const Tensor& target);
// sum max(0, B_next + eta - B_now + psi).
Var decrease_term(Var b_next, Var b_now, double psi, double eta);
// mean ||pi - pi_user|| over rows.
Var perf_term(Var actions, const Tensor& reference);

// Reference controller acting on latents; empty disables the performance term.
using UserPolicy = std::function<Tensor(const Tensor& z)>;
UserPolicy zero_policy(std::size_t action_dim);

// Network parameters bound to a tape.
struct BoundNetworks {
  nets::MlpVars encoder;
  nets::MlpVars dynamics;
  nets::MlpVars barrier;
  nets::MlpVars policy;
};

BoundNetworks bind(Tape& tape, const nets::Networks& nets, bool requires_grad);

// Observation rows from S, U and D; actions (n x 1) and successor
// observations belong to the D rows.
struct Batch {
  Tensor obs_safe;
  Tensor obs_unsafe;
  Tensor obs;
  Tensor actions;
  Tensor next_obs;
};

// xi1 sum_S max(0, B(z) + psi) + xi2 sum_U max(0, -B(z) + psi)
//   + xi3 sum_D ||E_target(O') - d(E(O), a)||^2.
Var salad_loss(Tape& tape, const nets::ParamStore& params,
               const BoundNetworks& online, const Batch& batch, double psi,
               const LossWeights& w);

// sum_D max(0, B_target(d(E_target(O), pi(z))) + eta - B(z) + psi), z = E(O).
// Target parameters are frozen; gradients reach d, pi, E and B.
Var syn_loss(Tape& tape, const nets::ParamStore& params,
             const BoundNetworks& online, const Batch& batch, double psi,
             double eta);

// mean_D ||pi(E(O)) - pi_user(E(O))||.
Var perf_loss(Tape& tape, const nets::ParamStore& params,
              const BoundNetworks& online, const Batch& batch,
              const UserPolicy& user);

struct TotalLoss {
  Var total;
  Var salad;
  Var syn;
  Var perf;  // invalid when the performance term is disabled
};

// lambda1 L_syn + lambda2 L_SaLaD + lambda3 L_pi on one batch.
TotalLoss total_loss(Tape& tape, const nets::ParamStore& params,
                     const BoundNetworks& online, const Batch& batch,
                     double psi, double eta, const LossWeights& w,
                     const UserPolicy& user);

Var combine(Var syn, Var salad, Var perf, const LossWeights& w);

}  // namespace salad::losses

#endif  // SALAD_LOSSES_LOSSES_HPP
