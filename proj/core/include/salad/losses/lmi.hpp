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

#ifndef SALAD_LOSSES_LMI_HPP
#define SALAD_LOSSES_LMI_HPP

#include <vector>

#include "salad/nets/mlp.hpp"
#include "salad/tensor/ops.hpp"

namespace salad::losses {

using tensor::Tape;
using tensor::Tensor;
using tensor::Var;

// Constant added to the loss while M is outside the positive definite cone.
inline constexpr double kInfeasiblePenalty = 1e3;

// Symmetric matrix whose positive semi-definiteness certifies that the
// network with the given weights is L-Lipschitz. Weights use the row-vector
// layout of nets::Layer (in x out). lambda is a 1 x (hidden neurons) row of
// positive multipliers; alpha/beta bound the activation slopes. The matrix
// is ordered [input | hidden layers | output], size n_0 + sum(n_k) + n_out.
Var build_lmi(const std::vector<Var>& weights, Var lambda, double alpha,
              double beta, double lipschitz);
Tensor build_lmi(const std::vector<Tensor>& weights, const Tensor& lambda,
                 double alpha, double beta, double lipschitz);

// Convenience over a barrier network and log-multipliers.
Var build_lmi(const nets::MlpSpec& spec, const nets::MlpVars& vars,
              Var log_lambda, double lipschitz);
Tensor build_lmi(const nets::Mlp& net, const Tensor& lambda, double lipschitz);

struct LmiLoss {
  Var loss;
  bool feasible = false;
  // log det M when feasible, otherwise NaN.
  double logdet = 0.0;
};

// -log det M when M is positive definite; otherwise
// kInfeasiblePenalty + (magnitude of the first non-positive pivot).
LmiLoss lmi_loss(Var m);

struct LmiStatus {
  bool feasible = false;
  // feasible and -log det M <= 0.
  bool satisfied = false;
  double logdet = 0.0;
};

LmiStatus lmi_status(const Tensor& m);

}  // namespace salad::losses

#endif  // SALAD_LOSSES_LMI_HPP
