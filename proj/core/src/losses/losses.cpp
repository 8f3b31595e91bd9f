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

#include "salad/losses/losses.hpp"

#include "salad/errors.hpp"

namespace salad::losses {
namespace {

using tensor::concat_cols;
using tensor::hinge;
using tensor::sum;

Var zero(Tape& tape) { return tape.constant(Tensor::scalar(0.0)); }

bool empty(const Tensor& t) { return t.size() == 0; }

Var encode(const nets::ParamStore& params, const BoundNetworks& online,
           Tape& tape, const Tensor& obs) {
  return nets::forward(params.specs().encoder, online.encoder,
                       tape.constant(obs));
}

Var salad_from(Tape& tape, const nets::ParamStore& params,
               const BoundNetworks& online, const Batch& batch, Var z_d,
               double psi, const LossWeights& w) {
  const nets::NetworkSpecs& specs = params.specs();
  Var total = zero(tape);
  if (!empty(batch.obs_safe)) {
    Var b = nets::forward(specs.barrier, online.barrier,
                          encode(params, online, tape, batch.obs_safe));
    total = total + w.xi1 * safe_term(b, psi);
  }
  if (!empty(batch.obs_unsafe)) {
    Var b = nets::forward(specs.barrier, online.barrier,
                          encode(params, online, tape, batch.obs_unsafe));
    total = total + w.xi2 * unsafe_term(b, psi);
  }
  if (!empty(batch.obs)) {
    Var predicted = nets::forward(
        specs.dynamics, online.dynamics,
        concat_cols(z_d, tape.constant(batch.actions)));
    const Tensor target = nets::encode(params.target.encoder, batch.next_obs);
    total = total + w.xi3 * consistency_term(predicted, target);
  }
  return total;
}

Var syn_from(Tape& tape, const nets::ParamStore& params,
             const BoundNetworks& online, const Batch& batch, Var z_d,
             double psi, double eta) {
  if (empty(batch.obs)) return zero(tape);
  const nets::NetworkSpecs& specs = params.specs();
  const Tensor z_target = nets::encode(params.target.encoder, batch.obs);
  Var action = nets::forward(specs.policy, online.policy, z_d);
  Var z_next = nets::forward(specs.dynamics, online.dynamics,
                             concat_cols(tape.constant(z_target), action));
  const nets::MlpVars frozen = params.target.barrier.bind(tape, false);
  Var b_next = nets::forward(specs.barrier, frozen, z_next);
  Var b_now = nets::forward(specs.barrier, online.barrier, z_d);
  return decrease_term(b_next, b_now, psi, eta);
}

Var perf_from(const nets::ParamStore& params,
              const BoundNetworks& online, Var z_d, const UserPolicy& user) {
  Var action = nets::forward(params.specs().policy, online.policy, z_d);
  return perf_term(action, user(z_d.value()));
}

}  // namespace

void LossWeights::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"loss.xi1", xi1},         {"loss.xi2", xi2},
      {"loss.xi3", xi3},         {"loss.lambda1", lambda1},
      {"loss.lambda2", lambda2}, {"loss.lambda3", lambda3}};
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0)) {
      throw ConfigError(name, "weight must be > 0, got " + std::to_string(value));
    }
  }
}

Var safe_term(Var b_safe, double psi) {
  return sum(hinge(tensor::add_scalar(b_safe, psi)));
}

Var unsafe_term(Var b_unsafe, double psi) {
  return sum(hinge(tensor::add_scalar(tensor::neg(b_unsafe), psi)));
}

Var consistency_term(Var predicted, const Tensor& target) {
  Var diff = predicted - predicted.tape()->constant(target);
  return sum(tensor::square(diff));
}

Var decrease_term(Var b_next, Var b_now, double psi, double eta) {
  return sum(hinge(tensor::add_scalar(b_next - b_now, eta + psi)));
}

Var perf_term(Var actions, const Tensor& reference) {
  Var diff = actions - actions.tape()->constant(reference);
  return tensor::mean(tensor::row_norms(diff));
}

UserPolicy zero_policy(std::size_t action_dim) {
  return [action_dim](const Tensor& z) {
    return Tensor({z.rows(), action_dim});
  };
}

BoundNetworks bind(Tape& tape, const nets::Networks& nets, bool requires_grad) {
  return BoundNetworks{nets.encoder.bind(tape, requires_grad),
                       nets.dynamics.bind(tape, requires_grad),
                       nets.barrier.bind(tape, requires_grad),
                       nets.policy.bind(tape, requires_grad)};
}

Var salad_loss(Tape& tape, const nets::ParamStore& params,
               const BoundNetworks& online, const Batch& batch, double psi,
               const LossWeights& w) {
  Var z_d = empty(batch.obs) ? Var() : encode(params, online, tape, batch.obs);
  return salad_from(tape, params, online, batch, z_d, psi, w);
}

Var syn_loss(Tape& tape, const nets::ParamStore& params,
             const BoundNetworks& online, const Batch& batch, double psi,
             double eta) {
  if (empty(batch.obs)) return zero(tape);
  return syn_from(tape, params, online, batch,
                  encode(params, online, tape, batch.obs), psi, eta);
}

Var perf_loss(Tape& tape, const nets::ParamStore& params,
              const BoundNetworks& online, const Batch& batch,
              const UserPolicy& user) {
  if (empty(batch.obs) || !user) return zero(tape);
  return perf_from(params, online,
                   encode(params, online, tape, batch.obs), user);
}

TotalLoss total_loss(Tape& tape, const nets::ParamStore& params,
                     const BoundNetworks& online, const Batch& batch,
                     double psi, double eta, const LossWeights& w,
                     const UserPolicy& user) {
  Var z_d = empty(batch.obs) ? Var() : encode(params, online, tape, batch.obs);
  TotalLoss out;
  out.salad = salad_from(tape, params, online, batch, z_d, psi, w);
  out.syn = empty(batch.obs) ? zero(tape)
                             : syn_from(tape, params, online, batch, z_d, psi, eta);
  if (user) {
    out.perf = empty(batch.obs) ? zero(tape)
                                : perf_from(params, online, z_d, user);
  }
  out.total = combine(out.syn, out.salad, out.perf, w);
  return out;
}

Var combine(Var syn, Var salad, Var perf, const LossWeights& w) {
  Var total = w.lambda1 * syn + w.lambda2 * salad;
  if (perf.valid()) total = total + w.lambda3 * perf;
  return total;
}

}  // namespace salad::losses
