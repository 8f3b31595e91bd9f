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

#ifndef SALAD_CERTIFY_BOUNDS_HPP
#define SALAD_CERTIFY_BOUNDS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "salad/nets/mlp.hpp"
#include "salad/tensor/tensor.hpp"

namespace salad::certify {

using tensor::Tensor;

// psi = L_B * eps_bar.
double psi_margin(double lipschitz, double eps_bar);
// eta = L_B * delta.
double eta_margin(double lipschitz, double delta);

// max over rows of ||predicted - target||.
double consistency_error(const Tensor& predicted, const Tensor& target);

// Largest singular value by power iteration on W^T W.
double spectral_norm(const Tensor& w, int max_iterations = 100,
                     double tolerance = 1e-9);

// Product of the spectral norms of the layer weights.
double lipschitz_upper_bound(const std::vector<Tensor>& weights);
double lipschitz_upper_bound(const nets::Mlp& net);

// max |f(a) - f(b)| / ||a - b|| over row pairs; coincident pairs skipped.
// f maps a batch of rows to one value per row.
using ScalarField = std::function<Tensor(const Tensor&)>;
double empirical_lipschitz(const ScalarField& f, const Tensor& a,
                           const Tensor& b);

// Pairs for probing a Lipschitz constant inside a box: half drawn
// independently, half as small perturbations of a random point.
struct PointPairs {
  Tensor a;
  Tensor b;
};
PointPairs random_pairs(const std::vector<double>& low,
                        const std::vector<double>& high, std::size_t count,
                        std::uint64_t seed);

}  // namespace salad::certify

#endif  // SALAD_CERTIFY_BOUNDS_HPP
