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

#ifndef SALAD_TRAIN_CONFIG_HPP
#define SALAD_TRAIN_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "salad/certify/verify.hpp"
#include "salad/envs/env_spec.hpp"
#include "salad/losses/losses.hpp"
#include "salad/nets/model.hpp"
#include "salad/train/adam.hpp"

namespace salad::train {

struct TrainConfig {
  envs::EnvSpec env = envs::EnvSpec::pendulum();

  // [data]
  std::size_t n_safe = 500;
  std::size_t n_unsafe = 500;
  std::size_t n_total = 3000;

  // [model]
  std::size_t latent_dim = 2;
  std::vector<std::size_t> encoder_hidden{256, 128};
  std::vector<std::size_t> dynamics_hidden{64, 64};
  std::vector<std::size_t> barrier_hidden{32, 32};
  std::vector<std::size_t> policy_hidden{64, 64};
  nets::Activation encoder_activation = nets::Activation::kRelu;
  nets::Activation dynamics_activation = nets::Activation::kRelu;
  nets::Activation barrier_activation = nets::Activation::kRelu;
  nets::Activation policy_activation = nets::Activation::kTanh;
  // Encoder output squashing; kTanhScaled keeps latents in [-bound, bound].
  nets::OutputActivation encoder_output = nets::OutputActivation::kTanhScaled;
  double encoder_bound = 1.0;

  // [train]
  std::size_t warm_start_epochs = 20;
  std::size_t max_iterations = 500;
  std::size_t batch_size = 64;
  std::size_t steps_per_iteration = 5;
  std::size_t lmi_steps = 5;
  // Extra penalty steps allowed per iteration while M is not positive definite;
  // past the limit the barrier is rescaled into the feasible set.
  std::size_t lmi_repair_limit = 500;
  double lr = 1e-3;
  double lmi_lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double polyak_rho = 0.995;
  std::size_t rollouts = 10;
  std::size_t horizon = 100;
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
  // "zero" (constant 0 reference) or "none" (performance term off).
  std::string user_policy = "zero";
  std::size_t checkpoint_every = 0;

  // [loss]
  losses::LossWeights weights;

  // [certify]
  double lipschitz = 2.0;
  std::size_t grid_per_axis = 100;
  std::size_t sobol_points = 100000;
  std::size_t delta_action_grid = 0;
  std::size_t verify_rollouts = 100;
  std::size_t verify_horizon = 200;
  std::size_t lipschitz_pairs = 100000;

  // Throws ConfigError naming the offending field.
  void validate() const;

  nets::NetworkSpecs network_specs() const;
  AdamConfig main_optimizer() const;
  AdamConfig lmi_optimizer() const;
  certify::MarginConfig margin_config() const;
  certify::VerifyConfig verify_config() const;
  losses::UserPolicy make_user_policy() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Environment-dependent defaults (frame size, latent size, L_B, reference
// policy).
TrainConfig default_config(envs::EnvId id);

// Sectioned INI text ([env] [data] [model] [train] [loss] [certify]).
// Unknown sections or keys are errors.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::filesystem::path& path);
std::string to_ini(const TrainConfig& config);

}  // namespace salad::train

#endif  // SALAD_TRAIN_CONFIG_HPP
