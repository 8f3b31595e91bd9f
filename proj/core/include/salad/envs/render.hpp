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

#ifndef SALAD_ENVS_RENDER_HPP
#define SALAD_ENVS_RENDER_HPP

#include <span>
#include <vector>

#include "salad/envs/env_spec.hpp"

namespace salad::envs {

// Rasterizes one frame (channel-major C x H x W, values in [0, 1]).
void render_frame(const EnvSpec& spec, const State& s, std::span<double> out);

// Observation = [frame(prev), frame(now)]. Pure function of its arguments.
void render_into(const EnvSpec& spec, const State& prev, const State& now,
                 std::span<double> out);
std::vector<double> render(const EnvSpec& spec, const State& prev,
                           const State& now);

struct Observation {
  std::vector<double> frames;
  State state_prev;
  State state_now;
  Label label = Label::kUnlabeled;
};

Observation observe(const EnvSpec& spec, const State& prev, const State& now);

}  // namespace salad::envs

#endif  // SALAD_ENVS_RENDER_HPP
