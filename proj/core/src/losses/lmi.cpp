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

#include "salad/losses/lmi.hpp"

#include <cmath>
#include <limits>

#include "salad/errors.hpp"

namespace salad::losses {

using tensor::matmul;
using tensor::place;
using tensor::transpose;

Var build_lmi(const std::vector<Var>& weights, Var lambda, double alpha,
              double beta, double lipschitz) {
  if (weights.size() < 2) {
    throw DimensionError("LMI needs a network with at least one hidden layer");
  }
  Tape& tape = *lambda.tape();
  const std::size_t l = weights.size() - 1;
  const std::size_t n0 = weights[0].value().rows();
  std::vector<std::size_t> offset;  // start of hidden layer k in hidden coords
  std::size_t hidden = 0;
  for (std::size_t k = 0; k < l; ++k) {
    const Tensor& w = weights[k].value();
    const std::size_t in = k == 0 ? n0 : weights[k - 1].value().cols();
    if (w.rows() != in) {
      throw DimensionError("LMI: layer " + std::to_string(k) +
                           " has incompatible width");
    }
    offset.push_back(hidden);
    hidden += w.cols();
  }
  const Tensor& last = weights[l].value();
  if (last.rows() != weights[l - 1].value().cols()) {
    throw DimensionError("LMI: output layer has incompatible width");
  }
  if (lambda.value().size() != hidden) {
    throw DimensionError("LMI: expected " + std::to_string(hidden) +
                         " multipliers, got " +
                         std::to_string(lambda.value().size()));
  }
  const std::size_t n_out = last.cols();
  const std::size_t nx = n0 + hidden;
  const std::size_t n = nx + n_out;

  // A maps [x, w_1, ..., w_l] to the pre-activations [v_1, ..., v_l].
  Var a;
  for (std::size_t k = 0; k < l; ++k) {
    const std::size_t col = k == 0 ? 0 : n0 + offset[k - 1];
    Var block = place(transpose(weights[k]), hidden, nx, offset[k], col);
    a = k == 0 ? block : a + block;
  }
  Var lam = tensor::diag(lambda);
  Var lam_a = matmul(lam, a);  // hidden x nx
  // B^T Lambda A and B^T Lambda B with B = [0 I].
  Var bt_lam_a = place(lam_a, nx, nx, n0, 0);
  Var quad = place(lam, nx, nx, n0, n0) * (2.0);
  quad = quad - (alpha + beta) * (bt_lam_a + transpose(bt_lam_a));
  if (alpha * beta != 0.0) {
    quad = quad + (2.0 * alpha * beta) * matmul(transpose(a), lam_a);
  }

  Tensor fixed({n, n});
  for (std::size_t i = 0; i < n0; ++i) fixed.at(i, i) = lipschitz * lipschitz;
  for (std::size_t i = nx; i < n; ++i) fixed.at(i, i) = 1.0;
  const std::size_t last_row = n0 + offset[l - 1];
  Var m = place(quad, n, n, 0, 0) + tape.constant(std::move(fixed));
  m = m - place(weights[l], n, n, last_row, nx);
  m = m - place(transpose(weights[l]), n, n, nx, last_row);
  return 0.5 * (m + transpose(m));
}

Tensor build_lmi(const std::vector<Tensor>& weights, const Tensor& lambda,
                 double alpha, double beta, double lipschitz) {
  Tape tape;
  std::vector<Var> w;
  w.reserve(weights.size());
  for (const Tensor& t : weights) w.push_back(tape.constant(t));
  return build_lmi(w, tape.constant(lambda), alpha, beta, lipschitz).value();
}

Var build_lmi(const nets::MlpSpec& spec, const nets::MlpVars& vars,
              Var log_lambda, double lipschitz) {
  const auto [alpha, beta] = spec.slopes();
  return build_lmi(vars.weights, tensor::exp(log_lambda), alpha, beta,
                   lipschitz);
}

Tensor build_lmi(const nets::Mlp& net, const Tensor& lambda, double lipschitz) {
  std::vector<Tensor> weights;
  for (const nets::Layer& layer : net.layers()) weights.push_back(layer.weight);
  const auto [alpha, beta] = net.spec().slopes();
  return build_lmi(weights, lambda, alpha, beta, lipschitz);
}

LmiLoss lmi_loss(Var m) {
  const tensor::linalg::CholeskyResult chol = tensor::linalg::cholesky(m.value());
  LmiLoss out;
  out.feasible = chol.positive_definite;
  if (out.feasible) {
    Var ld = tensor::logdet(m);
    out.logdet = ld.value().item();
    out.loss = tensor::neg(ld);
  } else {
    out.logdet = std::numeric_limits<double>::quiet_NaN();
    out.loss = tensor::add_scalar(tensor::pivot_deficit(m), kInfeasiblePenalty);
  }
  return out;
}

LmiStatus lmi_status(const Tensor& m) {
  const tensor::linalg::CholeskyResult chol = tensor::linalg::cholesky(m);
  LmiStatus out;
  out.feasible = chol.positive_definite;
  if (!out.feasible) {
    out.logdet = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double ld = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) ld += 2.0 * std::log(chol.lower.at(i, i));
  out.logdet = ld;
  out.satisfied = -ld <= 0.0;
  return out;
}

}  // namespace salad::losses
