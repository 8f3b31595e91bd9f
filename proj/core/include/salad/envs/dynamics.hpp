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

#ifndef SALAD_ENVS_DYNAMICS_HPP
#define SALAD_ENVS_DYNAMICS_HPP

#include "salad/envs/env_spec.hpp"
#include "salad/random.hpp"

namespace salad::envs {

// Wraps to [-pi, pi).
double wrap_angle(double theta);

// Explicit Euler step of the pendulum. theta is wrapped and theta_dot is
// saturated to the state bounds. Throws DimensionError when u is outside
// the action interval.
State pendulum_step(const EnvSpec& spec, const State& s, double u);

// Explicit Euler step of the constant-speed unicycle; theta wrapped.
State vehicle_step(const EnvSpec& spec, const State& s, double u);

State step(const EnvSpec& spec, const State& s, double u);

// Inverse of the unsaturated Euler step: the state from which action a_prev
// leads to `now`. Used to give sampled states a consistent previous frame.
State predecessor(const EnvSpec& spec, const State& now, double a_prev);

Label label(const EnvSpec& spec, const State& s);

enum class Region { kSafe, kUnsafe, kAll };

// Uniform sample from a labeled region of the state set.
State sample_state(const EnvSpec& spec, Region region, Rng& rng);

double sample_action(const EnvSpec& spec, Rng& rng);

}  // namespace salad::envs

#endif  // SALAD_ENVS_DYNAMICS_HPP
