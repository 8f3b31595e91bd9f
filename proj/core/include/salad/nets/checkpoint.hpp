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

#ifndef SALAD_NETS_CHECKPOINT_HPP
#define SALAD_NETS_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "salad/margins.hpp"
#include "salad/nets/model.hpp"

namespace salad::nets {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// On-disk layout (all integers and doubles little-endian):
//   "SLDC" u32 version
//   str env_id, u32 latent_dim, f64 L_B, psi, eta, eps_bar, delta,
//   u64 seed, f64 rho, u8 certified
//   u32 n_networks, per network: str name, u32 hidden act, u32 output act,
//     f64 out_low, f64 out_high, u32 n_layers,
//     per layer: u32 in, u32 out, f64[in*out] weight, f64[out] bias
//   u32 n_lambda, f64[n_lambda] log_lambda
//   u32 n_sections, per section: str name, u64 size, bytes
//   "END!"
// where str = u32 length followed by the bytes.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string env_id;
  std::uint32_t latent_dim = 0;
  Margins margins;
  std::uint64_t seed = 0;
  bool certified = false;
  ParamStore params;
  // Named opaque payloads owned by higher layers (environment description,
  // optimizer moments, data buffer, trainer state).
  std::vector<std::pair<std::string, std::string>> sections;

  const std::string* find_section(const std::string& name) const;
  void set_section(const std::string& name, std::string bytes);
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& checkpoint,
                     const std::filesystem::path& path);

// Throws CheckpointError on I/O failure, corruption, version mismatch, or when
// expected_env is given and differs from the stored environment id.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_env = {});

}  // namespace salad::nets

#endif  // SALAD_NETS_CHECKPOINT_HPP
