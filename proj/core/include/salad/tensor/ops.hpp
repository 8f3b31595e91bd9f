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

#ifndef SALAD_TENSOR_OPS_HPP
#define SALAD_TENSOR_OPS_HPP

#include <cstddef>

#include "salad/tensor/tape.hpp"
#include "salad/tensor/tensor.hpp"

namespace salad::tensor {

// Matrix ops. Operands of rank <= 2; rank-1 operands act as 1 x n rows.
Var matmul(Var a, Var b);
Var transpose(Var a);

// Elementwise over identical shapes.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_scalar(Var a, double offset);
Var neg(Var a);

// Adds the 1 x n row `bias` to every row of the m x n matrix `x`.
Var add_row(Var x, Var bias);

Var relu(Var x);
Var tanh(Var x);
Var exp(Var x);
Var square(Var x);

// max(0, x) with subgradient 0 at x == 0.
Var hinge(Var x);

// Reductions return rank-0 scalars except row_norms (m x 1).
Var sum(Var x);
Var mean(Var x);
Var l2norm(Var x);
Var row_norms(Var x);

// Structural ops.
Var concat_cols(Var a, Var b);
Var concat_rows(Var a, Var b);
Var slice_rows(Var x, std::size_t begin, std::size_t end);
Var slice_cols(Var x, std::size_t begin, std::size_t end);
// Embeds x into a rows x cols zero matrix with its top-left corner at (r0, c0).
Var place(Var x, std::size_t rows, std::size_t cols, std::size_t r0,
          std::size_t c0);
// Square diagonal matrix from the n entries of x.
Var diag(Var x);

// log det of (M + M^T) / 2 through a Cholesky factorization. Throws
// NotPositiveDefinite when a pivot is not strictly positive.
Var logdet(Var m);

// Distance-to-PD proxy for (M + M^T) / 2: the magnitude of the first
// non-positive Cholesky pivot (0 when positive definite). Differentiable in M
// through the Schur complement that defines that pivot.
Var pivot_deficit(Var m);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, double s) { return scale(a, s); }
inline Var operator*(double s, Var a) { return scale(a, s); }

// Plain (tape-free) helpers shared by the autodiff ops and by callers that
// only need values.
namespace linalg {

// C = A * B for row-major matrices.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

struct CholeskyResult {
  bool positive_definite = false;
  // Lower-triangular factor; rows past `failed_index` are undefined.
  Tensor lower;
  std::size_t failed_index = 0;
  double failed_pivot = 0.0;
};

// Factorizes the symmetric part of m without throwing.
CholeskyResult cholesky(const Tensor& m);

// Inverse of L L^T given the lower factor.
Tensor cholesky_inverse(const Tensor& lower);

}  // namespace linalg

}  // namespace salad::tensor

#endif  // SALAD_TENSOR_OPS_HPP
