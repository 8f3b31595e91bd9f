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

#ifndef SALAD_CERTIFY_COVER_HPP
#define SALAD_CERTIFY_COVER_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "salad/tensor/tensor.hpp"

namespace salad::certify {

using tensor::Tensor;

// Static kd-tree over the rows of an n x d matrix (Euclidean metric).
class KdTree {
 public:
  explicit KdTree(Tensor points);

  std::size_t size() const { return points_.rows(); }
  std::size_t dim() const { return points_.cols(); }

  // Distance from q (d entries) to its nearest point.
  double nearest_distance(const double* q) const;
  double nearest_distance2(const double* q) const;
  // Row index of the nearest point; ties resolve to the lowest index.
  std::size_t nearest(const double* q) const;
  // True when some point lies within squared distance r2 of q.
  bool any_within(const double* q, double r2) const;

 private:
  struct Node {
    std::size_t point;
    std::size_t axis;
    std::int64_t left;
    std::int64_t right;
  };

  std::int64_t build(std::size_t begin, std::size_t end, std::size_t depth);
  void search(std::int64_t node, const double* q, double& best2,
              std::size_t& best) const;
  bool search_within(std::int64_t node, const double* q, double r2) const;
  double dist2(std::size_t row, const double* q) const;

  Tensor points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::int64_t root_ = -1;
};

// max over probe rows of the distance to the nearest data row.
double covering_radius(const Tensor& data, const Tensor& probes);

// Axis-aligned bounding box of the rows.
struct Box {
  std::vector<double> low;
  std::vector<double> high;
};
Box bounding_box(const Tensor& points);

// Regular grid with `per_axis` points per axis spanning the box (ends
// included), last axis fastest.
Tensor grid_points(const Box& box, std::size_t per_axis);

// Scrambling-free Sobol points scaled into the box.
Tensor sobol_points(const Box& box, std::size_t count);

// Probe set for the covering radius: a grid when d <= 2, Sobol points else.
struct ProbeConfig {
  std::size_t grid_per_axis = 100;
  std::size_t sobol_points = 100000;
};
Tensor probe_set(const Tensor& latents, const ProbeConfig& config);

}  // namespace salad::certify

#endif  // SALAD_CERTIFY_COVER_HPP
