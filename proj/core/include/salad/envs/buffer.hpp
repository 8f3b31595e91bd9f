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

#ifndef SALAD_ENVS_BUFFER_HPP
#define SALAD_ENVS_BUFFER_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "salad/envs/env_spec.hpp"
#include "salad/tensor/tensor.hpp"

namespace salad::envs {

// (O_t, a_t, O_{t+1}) stored through the states the frames are rendered from:
// O_t = render(state_prev, state_now), O_{t+1} = render(state_now, state_next).
struct Transition {
  State state_prev;
  State state_now;
  double action = 0.0;
  State state_next;
  Label label = Label::kUnlabeled;
};

// Append-only transition store with label views. Labels come from label()
// on insertion and never change. Observations shared between records (the
// O_{t+1} of one rollout step is the O_t of the next) are stored once.
class DataBuffer {
 public:
  explicit DataBuffer(EnvSpec spec);

  const EnvSpec& spec() const { return spec_; }

  // Relabels from state_now and returns the record index.
  std::size_t append(Transition t);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const Transition& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<Transition>& records() const { return records_; }

  const std::vector<std::size_t>& safe_indices() const { return safe_; }
  const std::vector<std::size_t>& unsafe_indices() const { return unsafe_; }
  std::size_t unlabeled_count() const {
    return size() - safe_.size() - unsafe_.size();
  }

  // Distinct observations and the record -> observation maps.
  std::size_t observation_count() const { return observations_.size(); }
  std::size_t observation_index(std::size_t record) const { return obs_[record]; }
  std::size_t next_observation_index(std::size_t record) const {
    return next_obs_[record];
  }
  const State& observation_prev(std::size_t obs) const {
    return observations_[obs].first;
  }
  const State& observation_now(std::size_t obs) const {
    return observations_[obs].second;
  }

  // Rows are rendered observations.
  tensor::Tensor render_observations(std::span<const std::size_t> obs) const;
  tensor::Tensor observation_batch(std::span<const std::size_t> records) const;
  tensor::Tensor next_observation_batch(std::span<const std::size_t> records) const;

  friend bool operator==(const DataBuffer& a, const DataBuffer& b) {
    return a.spec_ == b.spec_ && a.records_ == b.records_;
  }

 private:
  std::size_t intern(const State& prev, const State& now);

  EnvSpec spec_;
  std::vector<Transition> records_;
  std::vector<std::size_t> safe_;
  std::vector<std::size_t> unsafe_;
  std::vector<std::pair<State, State>> observations_;
  std::unordered_map<std::string, std::size_t> obs_lookup_;
  std::vector<std::size_t> obs_;
  std::vector<std::size_t> next_obs_;
};

bool operator==(const Transition& a, const Transition& b);

// n_total records overall: n_safe drawn from the safe region, n_unsafe from
// the unsafe region and the rest uniformly over the state set. Actions and
// the action that produced the previous frame are uniform over U.
DataBuffer sample_datasets(const EnvSpec& spec, std::size_t n_safe,
                           std::size_t n_unsafe, std::size_t n_total,
                           std::uint64_t seed);

// Text index (one record per line) plus a sidecar blob of little-endian
// float32 frames holding [O_t, O_{t+1}] per record:
//   <env> <state_prev...> <state_now...> <action> <label> <offset> <count>
//   <state_next...>
// offset/count are in floats. The sidecar is <index path>.frames.
void export_dataset(const DataBuffer& buffer,
                    const std::filesystem::path& index_path);
DataBuffer import_dataset(const std::filesystem::path& index_path);
std::filesystem::path frames_path(const std::filesystem::path& index_path);

// Reads the stored [O_t, O_{t+1}] frames of one record from the sidecar.
std::vector<float> read_record_frames(const std::filesystem::path& index_path,
                                      std::size_t record);

// Compact binary form used inside checkpoints.
std::string serialize_buffer(const DataBuffer& buffer);
DataBuffer deserialize_buffer(const std::string& bytes);

}  // namespace salad::envs

#endif  // SALAD_ENVS_BUFFER_HPP
