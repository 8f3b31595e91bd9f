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

#include "salad/envs/rollout.hpp"

#include "salad/envs/dynamics.hpp"
#include "salad/envs/render.hpp"
#include "salad/errors.hpp"

namespace salad::envs {

std::vector<Trajectory> rollout(const EnvSpec& spec, const Controller& controller,
                                const std::vector<State>& starts,
                                std::size_t horizon) {
  const std::size_t n = starts.size();
  const std::size_t obs_size = spec.observation_size();
  std::vector<Trajectory> out(n);
  std::vector<State> prev(n);
  std::vector<State> now(starts);
  for (std::size_t k = 0; k < n; ++k) {
    prev[k] = predecessor(spec, starts[k], 0.0);
    out[k].states.reserve(horizon + 1);
    out[k].states.push_back(starts[k]);
    if (label(spec, starts[k]) == Label::kUnsafe) {
      ++out[k].unsafe_entries;
      out[k].safe = false;
    }
  }
  tensor::Tensor batch({n, obs_size});
  for (std::size_t t = 0; t < horizon && n > 0; ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      render_into(spec, prev[k], now[k], batch.data().subspan(k * obs_size, obs_size));
    }
    const std::vector<double> actions = controller(batch);
    if (actions.size() != n) {
      throw DimensionError("controller returned " +
                           std::to_string(actions.size()) + " actions for " +
                           std::to_string(n) + " observations");
    }
    for (std::size_t k = 0; k < n; ++k) {
      const State next = step(spec, now[k], actions[k]);
      Trajectory& traj = out[k];
      traj.actions.push_back(actions[k]);
      traj.transitions.push_back(Transition{prev[k], now[k], actions[k], next,
                                            label(spec, now[k])});
      traj.states.push_back(next);
      if (label(spec, next) == Label::kUnsafe) {
        ++traj.unsafe_entries;
        traj.safe = false;
      }
      prev[k] = now[k];
      now[k] = next;
    }
  }
  return out;
}

Trajectory rollout(const EnvSpec& spec, const Controller& controller,
                   const State& start, std::size_t horizon) {
  return std::move(rollout(spec, controller, std::vector<State>{start}, horizon)
                       .front());
}

}  // namespace salad::envs
