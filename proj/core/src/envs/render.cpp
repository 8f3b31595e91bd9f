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

#include "salad/envs/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "salad/envs/dynamics.hpp"
#include "salad/errors.hpp"

namespace salad::envs {
namespace {

// Pendulum drawing, in units of the pole length.
constexpr double kPendulumExtent = 1.2;
constexpr double kRodHalfWidth = 0.08;
constexpr double kBobRadius = 0.15;

// Vehicle drawing, in metres.
constexpr double kVehicleExtent = 2.0;
constexpr double kObstacleHalf = 0.7;
constexpr double kObstacleIntensity = 0.4;
constexpr double kRobotRadius = 0.12;
constexpr double kNoseLength = 0.22;
constexpr double kNoseHalfWidth = 0.04;

double norm2(double x, double y) { return std::sqrt(x * x + y * y); }

double segment_distance(double px, double py, double ax, double ay, double bx,
                        double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm2(px - (ax + t * dx), py - (ay + t * dy));
}

// Linear coverage ramp one pixel wide centred on the shape boundary.
double coverage(double signed_distance, double pixel) {
  return std::clamp(0.5 - signed_distance / pixel, 0.0, 1.0);
}

double box_distance(double px, double py, double half) {
  const double qx = std::abs(px) - half;
  const double qy = std::abs(py) - half;
  const double outside = norm2(std::max(qx, 0.0), std::max(qy, 0.0));
  return outside + std::min(std::max(qx, qy), 0.0);
}

template <typename Shade>
void rasterize(const EnvSpec& spec, double extent, std::span<double> out,
               Shade shade) {
  const std::size_t w = spec.frame_width;
  const std::size_t h = spec.frame_height;
  const std::size_t plane = w * h;
  const double pixel = 2.0 * extent / static_cast<double>(std::max(w, h));
  const bool rgb = spec.channels == ChannelMode::kRgb;
  for (std::size_t i = 0; i < h; ++i) {
    const double py = extent - (static_cast<double>(i) + 0.5) * 2.0 * extent /
                                   static_cast<double>(h);
    for (std::size_t j = 0; j < w; ++j) {
      const double px = (static_cast<double>(j) + 0.5) * 2.0 * extent /
                            static_cast<double>(w) -
                        extent;
      const std::array<double, 3> c = shade(px, py, pixel);
      const std::size_t k = i * w + j;
      if (rgb) {
        out[k] = c[0];
        out[plane + k] = c[1];
        out[2 * plane + k] = c[2];
      } else {
        out[k] = std::min(1.0, std::max({c[0], c[1], c[2]}));
      }
    }
  }
}

void render_pendulum(const EnvSpec& spec, const State& s, std::span<double> out) {
  const double l = spec.length;
  const double tip_x = l * std::sin(s[0]);
  const double tip_y = l * std::cos(s[0]);
  rasterize(spec, kPendulumExtent * l, out,
            [&](double px, double py, double pixel) -> std::array<double, 3> {
              const double rod =
                  segment_distance(px, py, 0.0, 0.0, tip_x, tip_y) -
                  kRodHalfWidth * l;
              const double bob =
                  norm2(px - tip_x, py - tip_y) - kBobRadius * l;
              return {coverage(rod, pixel), coverage(bob, pixel), 0.0};
            });
}

void render_vehicle(const EnvSpec& spec, const State& s, std::span<double> out) {
  const double nose_x = s[0] + kNoseLength * std::cos(s[2]);
  const double nose_y = s[1] + kNoseLength * std::sin(s[2]);
  rasterize(spec, kVehicleExtent, out,
            [&](double px, double py, double pixel) -> std::array<double, 3> {
              const double robot =
                  norm2(px - s[0], py - s[1]) - kRobotRadius;
              const double nose =
                  segment_distance(px, py, s[0], s[1], nose_x, nose_y) -
                  kNoseHalfWidth;
              const double obstacle = box_distance(px, py, kObstacleHalf);
              return {coverage(robot, pixel),
                      kObstacleIntensity * coverage(obstacle, pixel),
                      coverage(nose, pixel)};
            });
}

}  // namespace

void render_frame(const EnvSpec& spec, const State& s, std::span<double> out) {
  if (out.size() != spec.frame_size()) {
    throw DimensionError("frame buffer has " + std::to_string(out.size()) +
                         " entries, expected " +
                         std::to_string(spec.frame_size()));
  }
  if (spec.id == EnvId::kPendulum) {
    render_pendulum(spec, s, out);
  } else {
    render_vehicle(spec, s, out);
  }
}

void render_into(const EnvSpec& spec, const State& prev, const State& now,
                 std::span<double> out) {
  if (out.size() != spec.observation_size()) {
    throw DimensionError("observation buffer has " +
                         std::to_string(out.size()) + " entries, expected " +
                         std::to_string(spec.observation_size()));
  }
  const std::size_t f = spec.frame_size();
  render_frame(spec, prev, out.subspan(0, f));
  render_frame(spec, now, out.subspan(f, f));
}

std::vector<double> render(const EnvSpec& spec, const State& prev,
                           const State& now) {
  std::vector<double> out(spec.observation_size());
  render_into(spec, prev, now, out);
  return out;
}

Observation observe(const EnvSpec& spec, const State& prev, const State& now) {
  return Observation{render(spec, prev, now), prev, now, label(spec, now)};
}

}  // namespace salad::envs
