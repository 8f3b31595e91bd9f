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

#ifndef SALAD_TRAIN_TRAINER_HPP
#define SALAD_TRAIN_TRAINER_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "salad/envs/buffer.hpp"
#include "salad/margins.hpp"
#include "salad/nets/checkpoint.hpp"
#include "salad/nets/model.hpp"
#include "salad/random.hpp"
#include "salad/train/adam.hpp"
#include "salad/train/config.hpp"

namespace salad::train {

// One row per outer iteration; state at the start of the iteration.
struct LogRow {
  std::size_t iteration = 0;
  std::size_t records = 0;
  std::size_t safe = 0;
  std::size_t unsafe = 0;
  Margins margins;
  double loss_total = 0.0;
  double loss_salad = 0.0;
  double loss_syn = 0.0;
  double loss_perf = 0.0;
  std::size_t q1_violations = 0;
  std::size_t q2_violations = 0;
  std::size_t q3_violations = 0;
  bool lmi_feasible = false;
  bool lmi_satisfied = false;
  double lmi_logdet = 0.0;
  double main_lr = 0.0;
  std::size_t rollout_unsafe = 0;
  std::size_t lmi_steps = 0;
  bool converged = false;
};

struct WarmRow {
  std::size_t epoch = 0;
  double eps_bar = 0.0;
  double psi = 0.0;
  double loss_salad = 0.0;  // mean over the epoch's minibatches
};

class TrainLog {
 public:
  std::vector<LogRow> rows;
  std::vector<WarmRow> warm;

  static const char* header();
  static const char* warm_header();
  std::string csv() const;
  std::string warm_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  void write_warm_csv(const std::filesystem::path& path) const;

  std::string serialize() const;
  static TrainLog deserialize(const std::string& bytes);
};

struct TrainResult {
  bool converged = false;
  std::size_t iterations = 0;
  Margins margins;
};

// Loss values over the whole buffer.
struct BufferLosses {
  double salad = 0.0;
  double syn = 0.0;
  double perf = 0.0;
  double total = 0.0;
};

// Scales the online barrier so the product of its layer norms is at most
// 0.9 * lipschitz, then picks per-layer multipliers maximizing log det M.
void project_certificate(nets::ParamStore& params, double lipschitz);

// project_certificate followed by a target sync.
void initialize_certificate(nets::ParamStore& params, double lipschitz);

class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  // Restores a run saved by checkpoint(); continues bit-identically.
  static Trainer resume(const nets::Checkpoint& checkpoint);

  const TrainConfig& config() const { return config_; }
  const nets::ParamStore& params() const { return params_; }
  nets::ParamStore& params() { return params_; }
  const envs::DataBuffer& buffer() const { return buffer_; }
  const TrainLog& log() const { return log_; }
  const Margins& margins() const { return margins_; }
  std::size_t iteration() const { return iteration_; }
  bool warm_started() const { return warm_done_; }
  bool converged() const { return converged_; }
  // Seconds spent per outer iteration (kept out of the log for determinism).
  const std::vector<double>& iteration_seconds() const { return seconds_; }

  // Warm start of the latent model on the sampled datasets.
  void warm_start();

  // One outer iteration. Returns true when the stopping rule holds (in which
  // case no parameters change).
  bool iterate();

  // Warm start (if pending) and iterations until convergence or the limit.
  // `after_iteration` runs after every iteration.
  TrainResult run(const std::function<void(const Trainer&)>& after_iteration = {});

  // Full-buffer losses with the current margins.
  BufferLosses buffer_losses(const Tensor& online_latents,
                             const Tensor& target_latents) const;

  nets::Checkpoint checkpoint() const;

 private:
  Trainer() = default;

  losses::Batch sample_batch();
  double loss_step(double lr);
  // Returns whether M was positive definite before the step.
  bool lmi_step();
  double salad_step(const std::vector<std::size_t>& records, double psi);
  void collect_rollouts(LogRow& row);

  std::vector<Tensor*> main_parameters();
  std::vector<Tensor*> lmi_parameters();

  TrainConfig config_;
  envs::DataBuffer buffer_{envs::EnvSpec::pendulum()};
  nets::ParamStore params_;
  Adam main_opt_;
  Adam lmi_opt_;
  Rng rng_;
  Margins margins_;
  TrainLog log_;
  losses::UserPolicy user_;
  std::size_t iteration_ = 0;
  bool warm_done_ = false;
  bool converged_ = false;
  std::vector<double> seconds_;
};

}  // namespace salad::train

#endif  // SALAD_TRAIN_TRAINER_HPP
