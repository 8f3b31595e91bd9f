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

#ifndef SALAD_CERTIFY_VERIFY_HPP
#define SALAD_CERTIFY_VERIFY_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "salad/certify/cover.hpp"
#include "salad/envs/buffer.hpp"
#include "salad/envs/rollout.hpp"
#include "salad/margins.hpp"
#include "salad/nets/model.hpp"

namespace salad::certify {

// Latents of every distinct observation of the buffer, in observation order.
Tensor encode_observations(const envs::DataBuffer& buffer,
                           const nets::Mlp& encoder, std::size_t chunk = 256);

// Latents of the records' current (O_t) observations.
Tensor record_latents(const envs::DataBuffer& buffer, const Tensor& obs_latents);
Tensor next_record_latents(const envs::DataBuffer& buffer,
                           const Tensor& obs_latents);

// Record actions as an n x 1 column.
Tensor record_actions(const envs::DataBuffer& buffer);

// delta over the buffer with the stored actions:
// max_i ||d(z_i, a_i) - E(O_{i+1})||.
double consistency_error(const envs::DataBuffer& buffer, const nets::Networks& nets,
                         const Tensor& obs_latents);

// Stricter variant: for each record, the worst error over `actions`
// uniformly spaced actions, each re-simulated from the record's state.
double consistency_error_action_grid(const envs::DataBuffer& buffer,
                                     const nets::Networks& nets,
                                     const Tensor& obs_latents,
                                     std::size_t actions);

struct MarginConfig {
  double lipschitz = 1.0;
  ProbeConfig probes;
  // 0 uses the stored actions; otherwise the action-grid variant.
  std::size_t delta_action_grid = 0;
};

// eps_bar over the record latents, delta, and the psi/eta bounds.
Margins compute_margins(const envs::DataBuffer& buffer, const nets::Networks& nets,
                        const Tensor& obs_latents, const MarginConfig& config);

// Margined slacks; a condition is violated where its slack is > 0.
//   q1: B(z) + psi                           on S
//   q2: -B(z) + psi                          on U
//   q3: B(d(z, pi(z))) + eta - B(z) + psi    on D
struct Slacks {
  std::vector<double> q1;
  std::vector<double> q2;
  std::vector<double> q3;
  std::vector<std::size_t> q1_records;
  std::vector<std::size_t> q2_records;
};

Slacks condition_slacks(const envs::DataBuffer& buffer, const nets::Networks& nets,
                        const Tensor& obs_latents, double psi, double eta);

// q3 in the form used for training: successor through the target encoder
// and judged by the target barrier.
std::vector<double> target_decrease_slacks(const envs::DataBuffer& buffer,
                                           const nets::ParamStore& params,
                                           const Tensor& obs_latents,
                                           double psi, double eta);

struct ConditionStats {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // max slack, -inf when empty
};
ConditionStats summarize(const std::vector<double>& slacks);

struct VerifyConfig {
  MarginConfig margins;
  std::size_t lipschitz_pairs = 100000;
  std::size_t rollouts = 100;
  std::size_t horizon = 200;
  std::uint64_t seed = 0;
};

struct CertificateReport {
  std::string env;
  std::size_t records = 0;
  std::size_t safe_records = 0;
  std::size_t unsafe_records = 0;
  Margins margins;
  ConditionStats q1;
  ConditionStats q2;
  ConditionStats q3;
  ConditionStats q3_target;
  bool lmi_feasible = false;
  bool lmi_satisfied = false;
  double lmi_logdet = 0.0;
  double lipschitz_upper_bound = 0.0;
  double empirical_lipschitz = 0.0;
  double empirical_ratio = 0.0;
  std::size_t rollouts = 0;
  std::size_t horizon = 0;
  std::size_t safe_starts = 0;
  std::size_t rollout_violations = 0;     // unsafe states visited
  std::size_t unsafe_trajectories = 0;
  bool certified = false;

  Slacks slacks;
};

// Recomputes margins, checks the three margined conditions on the buffer and
// the LMI, probes the Lipschitz constant and runs policy rollouts from safe
// starts. Throws EnvironmentMismatch when the buffer's environment differs
// from `env`.
CertificateReport verify(const nets::ParamStore& params, const envs::EnvSpec& env,
                         const envs::DataBuffer& buffer,
                         const VerifyConfig& config);

// key = value lines.
std::string report_text(const CertificateReport& report);
void write_report(const CertificateReport& report,
                  const std::filesystem::path& path);
// condition,record,slack
void write_slacks_csv(const CertificateReport& report,
                      const std::filesystem::path& path);

// Closed-loop controller of a parameter set: encode -> policy.
envs::Controller policy_controller(const nets::Networks& nets);

// Unmargined conditions on a dense latent grid restricted to points within
// eps_bar of the buffer latents. Points within eps_bar of a safe (unsafe)
// latent are checked for B <= 0 (-B <= 0); every covered point is
// checked for B(d(z, pi(z))) - B(z) <= 0.
struct ExtensionReport {
  std::size_t grid_points = 0;
  std::size_t covered = 0;
  ConditionStats q1;
  ConditionStats q2;
  ConditionStats q3;
};
ExtensionReport extension_check(const envs::DataBuffer& buffer,
                                const nets::Networks& nets,
                                const Tensor& obs_latents, double eps_bar,
                                std::size_t per_axis);

}  // namespace salad::certify

#endif  // SALAD_CERTIFY_VERIFY_HPP
