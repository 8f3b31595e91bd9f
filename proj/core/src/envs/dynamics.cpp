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

#include "salad/envs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "salad/errors.hpp"

namespace salad::envs {
namespace {

constexpr double kPi = std::numbers::pi;

// Pendulum label regions.
constexpr double kSafeTheta = kPi / 12.0;
constexpr double kSafeThetaDot = 0.25;
constexpr double kUnsafeTheta = kPi / 2.0;
constexpr double kUnsafeThetaDot = 1.5;

// Vehicle label regions (max-norm boxes in the x-y plane).
constexpr double kArena = 2.0;
constexpr double kSafeInner = 1.5;
constexpr double kObstacle = 0.7;

void check_action(const EnvSpec& spec, double u) {
  if (!spec.action_in_bounds(u)) {
    throw DimensionError("action " + std::to_string(u) + " outside [" +
                         std::to_string(spec.action_low) + ", " +
                         std::to_string(spec.action_high) + "]");
  }
}

}  // namespace

double wrap_angle(double theta) {
  return theta - 2.0 * kPi * std::floor((theta + kPi) / (2.0 * kPi));
}

State pendulum_step(const EnvSpec& spec, const State& s, double u) {
  check_action(spec, u);
  const double theta = s[0];
  const double theta_dot = s[1];
  const double accel = spec.gravity / spec.length * std::sin(theta) +
                       u / (spec.mass * spec.length * spec.length);
  const double next_theta = wrap_angle(theta + theta_dot * spec.dt);
  const double next_dot = std::clamp(theta_dot + accel * spec.dt,
                                     spec.state_low[1], spec.state_high[1]);
  return State::pendulum(next_theta, next_dot);
}

State vehicle_step(const EnvSpec& spec, const State& s, double u) {
  check_action(spec, u);
  const double theta = s[2];
  return State::vehicle(s[0] + spec.speed * std::cos(theta) * spec.dt,
                        s[1] + spec.speed * std::sin(theta) * spec.dt,
                        wrap_angle(theta + u * spec.dt));
}

State step(const EnvSpec& spec, const State& s, double u) {
  return spec.id == EnvId::kPendulum ? pendulum_step(spec, s, u)
                                     : vehicle_step(spec, s, u);
}

State predecessor(const EnvSpec& spec, const State& now, double a_prev) {
  if (spec.id == EnvId::kVehicle) {
    const double theta = wrap_angle(now[2] - a_prev * spec.dt);
    return State::vehicle(now[0] - spec.speed * std::cos(theta) * spec.dt,
                          now[1] - spec.speed * std::sin(theta) * spec.dt,
                          theta);
  }
  // theta_now = theta_prev + w_prev dt,
  // w_now = w_prev + (g/l sin(theta_prev) + a/(m l^2)) dt.
  // Fixed point in w_prev; the map contracts with factor g/l dt^2.
  const double drive = a_prev / (spec.mass * spec.length * spec.length);
  double w_prev = now[1];
  for (int it = 0; it < 100; ++it) {
    const double theta_prev = now[0] - w_prev * spec.dt;
    const double next =
        now[1] - (spec.gravity / spec.length * std::sin(theta_prev) + drive) *
                     spec.dt;
    const bool converged = std::abs(next - w_prev) < 1e-15;
    w_prev = next;
    if (converged) break;
  }
  return State::pendulum(wrap_angle(now[0] - w_prev * spec.dt), w_prev);
}

Label label(const EnvSpec& spec, const State& s) {
  if (spec.id == EnvId::kPendulum) {
    const double theta = std::abs(wrap_angle(s[0]));
    const double theta_dot = std::abs(s[1]);
    if (theta <= kSafeTheta && theta_dot <= kSafeThetaDot) return Label::kSafe;
    if (theta > kUnsafeTheta || theta_dot > kUnsafeThetaDot) {
      return Label::kUnsafe;
    }
    return Label::kUnlabeled;
  }
  const double r = std::max(std::abs(s[0]), std::abs(s[1]));
  if (r <= kObstacle) return Label::kUnsafe;
  if (r > kSafeInner && r <= kArena) return Label::kSafe;
  return Label::kUnlabeled;
}

State sample_state(const EnvSpec& spec, Region region, Rng& rng) {
  if (spec.id == EnvId::kPendulum) {
    if (region == Region::kSafe) {
      return State::pendulum(uniform(rng, -kSafeTheta, kSafeTheta),
                             uniform(rng, -kSafeThetaDot, kSafeThetaDot));
    }
    for (;;) {
      State s = State::pendulum(uniform(rng, spec.state_low[0], spec.state_high[0]),
                                uniform(rng, spec.state_low[1], spec.state_high[1]));
      if (region == Region::kAll || label(spec, s) == Label::kUnsafe) return s;
    }
  }
  const double theta = uniform(rng, spec.state_low[2], spec.state_high[2]);
  if (region == Region::kUnsafe) {
    return State::vehicle(uniform(rng, -kObstacle, kObstacle),
                          uniform(rng, -kObstacle, kObstacle), theta);
  }
  for (;;) {
    State s = State::vehicle(uniform(rng, spec.state_low[0], spec.state_high[0]),
                             uniform(rng, spec.state_low[1], spec.state_high[1]),
                             theta);
    if (region == Region::kAll || label(spec, s) == Label::kSafe) return s;
  }
}

double sample_action(const EnvSpec& spec, Rng& rng) {
  return uniform(rng, spec.action_low, spec.action_high);
}

}  // namespace salad::envs
