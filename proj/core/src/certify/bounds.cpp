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

#include "salad/certify/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "salad/errors.hpp"
#include "salad/random.hpp"
#include "salad/tensor/ops.hpp"

namespace salad::certify {

double psi_margin(double lipschitz, double eps_bar) { return lipschitz * eps_bar; }

double eta_margin(double lipschitz, double delta) { return lipschitz * delta; }

double consistency_error(const Tensor& predicted, const Tensor& target) {
  if (predicted.shape() != target.shape()) {
    throw DimensionError("consistency error: shape mismatch " +
                         tensor::shape_string(predicted.shape()) + " vs " +
                         tensor::shape_string(target.shape()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < predicted.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < predicted.cols(); ++k) {
      const double d = predicted.at(i, k) - target.at(i, k);
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

double spectral_norm(const Tensor& w, int max_iterations, double tolerance) {
  const std::size_t n = w.cols();
  if (w.size() == 0) return 0.0;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  // Break symmetry with a fixed, non-degenerate start.
  for (std::size_t j = 0; j < n; ++j) v[j] *= 1.0 + 0.01 * static_cast<double>(j % 7);
  std::vector<double> u(w.rows());
  double sigma = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += w.at(i, j) * v[j];
      u[i] = s;
    }
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) v[j] += w.at(i, j) * u[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (double& x : v) x /= norm;
    const double next = std::sqrt(norm);
    const bool done = std::abs(next - sigma) <= tolerance * std::max(1.0, next);
    sigma = next;
    if (done) break;
  }
  return sigma;
}

double lipschitz_upper_bound(const std::vector<Tensor>& weights) {
  double bound = 1.0;
  for (const Tensor& w : weights) bound *= spectral_norm(w);
  return bound;
}

double lipschitz_upper_bound(const nets::Mlp& net) {
  std::vector<Tensor> weights;
  for (const nets::Layer& layer : net.layers()) weights.push_back(layer.weight);
  return lipschitz_upper_bound(weights);
}

double empirical_lipschitz(const ScalarField& f, const Tensor& a,
                           const Tensor& b) {
  if (a.shape() != b.shape()) throw DimensionError("pair sets differ in shape");
  const Tensor fa = f(a);
  const Tensor fb = f(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double d = a.at(i, k) - b.at(i, k);
      s += d * d;
    }
    if (s == 0.0) continue;
    worst = std::max(worst, std::abs(fa[i] - fb[i]) / std::sqrt(s));
  }
  return worst;
}

PointPairs random_pairs(const std::vector<double>& low,
                        const std::vector<double>& high, std::size_t count,
                        std::uint64_t seed) {
  const std::size_t d = low.size();
  Rng rng(seed);
  PointPairs out{Tensor({count, d}), Tensor({count, d})};
  for (std::size_t i = 0; i < count; ++i) {
    const bool local = i % 2 == 1;
    for (std::size_t k = 0; k < d; ++k) {
      const double x = uniform(rng, low[k], high[k]);
      const double width = high[k] - low[k];
      out.a.at(i, k) = x;
      out.b.at(i, k) = local ? x + 1e-3 * width * uniform(rng, -1.0, 1.0)
                             : uniform(rng, low[k], high[k]);
    }
  }
  return out;
}

}  // namespace salad::certify
