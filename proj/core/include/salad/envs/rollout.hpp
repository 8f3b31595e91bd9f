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

#ifndef SALAD_ENVS_ROLLOUT_HPP
#define SALAD_ENVS_ROLLOUT_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "salad/envs/buffer.hpp"
#include "salad/envs/env_spec.hpp"
#include "salad/tensor/tensor.hpp"

namespace salad::envs {

// Maps a batch of observations (one row each) to one action per row.
using Controller = std::function<std::vector<double>(const tensor::Tensor&)>;

struct Trajectory {
  std::vector<State> states;   // horizon + 1 entries, states[0] = start
  std::vector<double> actions;  // horizon entries
  std::vector<Transition> transitions;
  std::size_t unsafe_entries = 0;  // visited states labeled unsafe
  bool safe = true;
};

// Runs render -> controller -> step for `horizon` steps from each start, all
// starts advanced in lock-step so the controller sees one batch per step.
// The first observation uses predecessor(start, 0) as its previous frame.
std::vector<Trajectory> rollout(const EnvSpec& spec, const Controller& controller,
                                const std::vector<State>& starts,
                                std::size_t horizon);

Trajectory rollout(const EnvSpec& spec, const Controller& controller,
                   const State& start, std::size_t horizon);

}  // namespace salad::envs

#endif  // SALAD_ENVS_ROLLOUT_HPP
