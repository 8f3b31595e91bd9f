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

#ifndef SALAD_ENVS_ENV_SPEC_HPP
#define SALAD_ENVS_ENV_SPEC_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace salad::envs {

enum class EnvId { kPendulum, kVehicle };
enum class ChannelMode { kGray, kRgb };
enum class Label { kSafe, kUnsafe, kUnlabeled };

std::string to_string(EnvId id);
std::string to_string(ChannelMode mode);
std::string to_string(Label label);
EnvId parse_env_id(const std::string& name);
ChannelMode parse_channel_mode(const std::string& name);
Label parse_label(const std::string& name);

// Pendulum: (theta rad, theta_dot rad/s), theta = 0 upright.
// Vehicle:  (x m, y m, theta rad).
struct State {
  std::array<double, 3> v{};
  std::size_t dim = 2;

  static State pendulum(double theta, double theta_dot) {
    return State{{theta, theta_dot, 0.0}, 2};
  }
  static State vehicle(double x, double y, double theta) {
    return State{{x, y, theta}, 3};
  }

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  friend bool operator==(const State&, const State&) = default;
};

struct EnvSpec {
  EnvId id = EnvId::kPendulum;
  std::vector<double> state_low;
  std::vector<double> state_high;
  double action_low = -10.0;
  double action_high = 10.0;
  double dt = 0.05;
  // Pendulum physics.
  double mass = 1.0;
  double length = 1.0;
  double gravity = 10.0;
  // Vehicle forward speed.
  double speed = 1.0;
  std::size_t frame_width = 32;
  std::size_t frame_height = 32;
  ChannelMode channels = ChannelMode::kGray;
  std::size_t frames_per_observation = 2;

  static EnvSpec pendulum();
  static EnvSpec vehicle();
  static EnvSpec defaults(EnvId id);

  void validate() const;
  std::size_t state_dim() const { return id == EnvId::kPendulum ? 2 : 3; }
  std::size_t channel_count() const {
    return channels == ChannelMode::kGray ? 1 : 3;
  }
  std::size_t frame_size() const {
    return channel_count() * frame_width * frame_height;
  }
  std::size_t observation_size() const {
    return frames_per_observation * frame_size();
  }
  bool action_in_bounds(double u) const {
    return u >= action_low && u <= action_high;
  }

  // Single-line "key=value;..." form used inside checkpoints and datasets.
  std::string serialize() const;
  static EnvSpec deserialize(const std::string& text);

  friend bool operator==(const EnvSpec&, const EnvSpec&) = default;
};

}  // namespace salad::envs

#endif  // SALAD_ENVS_ENV_SPEC_HPP
