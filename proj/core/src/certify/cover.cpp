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

#include "salad/certify/cover.hpp"

#include <algorithm>
#include <boost/random/sobol.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "salad/errors.hpp"

namespace salad::certify {

KdTree::KdTree(Tensor points) : points_(std::move(points)) {
  if (points_.rank() != 2 || points_.rows() == 0) {
    throw DimensionError("kd-tree needs a nonempty n x d point set");
  }
  order_.resize(points_.rows());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(points_.rows());
  root_ = build(0, order_.size(), 0);
}

std::int64_t KdTree::build(std::size_t begin, std::size_t end,
                           std::size_t depth) {
  if (begin >= end) return -1;
  const std::size_t axis = depth % dim();
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::size_t a, std::size_t b) {
                     const double va = points_.at(a, axis);
                     const double vb = points_.at(b, axis);
                     return va < vb || (va == vb && a < b);
                   });
  const auto id = static_cast<std::int64_t>(nodes_.size());
  nodes_.push_back(Node{order_[mid], axis, -1, -1});
  const std::int64_t left = build(begin, mid, depth + 1);
  const std::int64_t right = build(mid + 1, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::dist2(std::size_t row, const double* q) const {
  const std::size_t d_count = dim();
  const double* p = points_.data().data() + row * d_count;
  double s = 0.0;
  for (std::size_t k = 0; k < d_count; ++k) {
    const double d = p[k] - q[k];
    s += d * d;
  }
  return s;
}

void KdTree::search(std::int64_t node, const double* q, double& best2,
                    std::size_t& best) const {
  if (node < 0) return;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const double d2 = dist2(n.point, q);
  if (d2 < best2 || (d2 == best2 && n.point < best)) {
    best2 = d2;
    best = n.point;
  }
  const double diff = q[n.axis] - points_.at(n.point, n.axis);
  const std::int64_t near = diff < 0.0 ? n.left : n.right;
  const std::int64_t far = diff < 0.0 ? n.right : n.left;
  search(near, q, best2, best);
  if (diff * diff <= best2) search(far, q, best2, best);
}

bool KdTree::search_within(std::int64_t node, const double* q,
                           double r2) const {
  if (node < 0) return false;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (dist2(n.point, q) <= r2) return true;
  const double diff = q[n.axis] - points_.at(n.point, n.axis);
  const std::int64_t near = diff < 0.0 ? n.left : n.right;
  const std::int64_t far = diff < 0.0 ? n.right : n.left;
  if (search_within(near, q, r2)) return true;
  return diff * diff <= r2 && search_within(far, q, r2);
}

bool KdTree::any_within(const double* q, double r2) const {
  return search_within(root_, q, r2);
}

std::size_t KdTree::nearest(const double* q) const {
  double best2 = std::numeric_limits<double>::infinity();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  search(root_, q, best2, best);
  return best;
}

double KdTree::nearest_distance2(const double* q) const {
  return dist2(nearest(q), q);
}

double KdTree::nearest_distance(const double* q) const {
  return std::sqrt(nearest_distance2(q));
}

double covering_radius(const Tensor& data, const Tensor& probes) {
  if (data.size() == 0 || probes.size() == 0) {
    throw DimensionError("covering radius needs nonempty data and probes");
  }
  if (data.cols() != probes.cols()) {
    throw DimensionError("covering radius: data and probes differ in dimension");
  }
  const KdTree tree(data);
  double radius2 = 0.0;
  for (std::size_t i = 0; i < probes.rows(); ++i) {
    const double* q = &probes.data()[i * probes.cols()];
    if (i > 0 && tree.any_within(q, radius2)) continue;
    radius2 = std::max(radius2, tree.nearest_distance2(q));
  }
  return std::sqrt(radius2);
}

Box bounding_box(const Tensor& points) {
  if (points.rows() == 0) throw DimensionError("bounding box of an empty set");
  const std::size_t d = points.cols();
  Box box{std::vector<double>(d, std::numeric_limits<double>::infinity()),
          std::vector<double>(d, -std::numeric_limits<double>::infinity())};
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      box.low[k] = std::min(box.low[k], points.at(i, k));
      box.high[k] = std::max(box.high[k], points.at(i, k));
    }
  }
  return box;
}

Tensor grid_points(const Box& box, std::size_t per_axis) {
  if (per_axis == 0) throw DimensionError("grid needs at least one point per axis");
  const std::size_t d = box.low.size();
  std::size_t count = 1;
  for (std::size_t k = 0; k < d; ++k) count *= per_axis;
  Tensor out({count, d});
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double t = per_axis == 1 ? 0.5
                                     : static_cast<double>(idx[k]) /
                                           static_cast<double>(per_axis - 1);
      out.at(i, k) = box.low[k] + t * (box.high[k] - box.low[k]);
    }
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < per_axis) break;
      idx[k] = 0;
    }
  }
  return out;
}

Tensor sobol_points(const Box& box, std::size_t count) {
  const std::size_t d = box.low.size();
  boost::random::sobol engine(d);
  Tensor out({count, d});
  const double scale =
      1.0 / (static_cast<double>(boost::random::sobol::max()) + 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double t = static_cast<double>(engine()) * scale;
      out.at(i, k) = box.low[k] + t * (box.high[k] - box.low[k]);
    }
  }
  return out;
}

Tensor probe_set(const Tensor& latents, const ProbeConfig& config) {
  const Box box = bounding_box(latents);
  return latents.cols() <= 2 ? grid_points(box, config.grid_per_axis)
                             : sobol_points(box, config.sobol_points);
}

}  // namespace salad::certify
