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

#include "salad/tensor/ops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "salad/errors.hpp"

namespace salad::tensor {
namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap as_matrix(const Tensor& t) {
  return ConstMap(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}

MutMap as_matrix(Tensor& t) {
  return MutMap(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

bool needs(Tape& tape, std::size_t node) { return tape.requires_grad(node); }

// Shared driver for same-shape (or scalar-broadcast) binary ops. `fwd` maps
// (x, y) -> z; `dx`/`dy` give the local partials at (x, y).
template <typename Fwd, typename Dx, typename Dy>
Var binary(const char* name, Var a, Var b, Fwd fwd, Dx dx, Dy dy) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool same = av.shape() == bv.shape();
  const bool a_scalar = av.size() == 1 && !same;
  const bool b_scalar = bv.size() == 1 && !same;
  require(same || a_scalar || b_scalar,
          std::string(name) + ": shape mismatch " + shape_string(av.shape()) +
              " vs " + shape_string(bv.shape()));
  Tensor out(b_scalar || same ? av.shape() : bv.shape());
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = fwd(av[a_scalar ? 0 : i], bv[b_scalar ? 0 : i]);
  }
  const std::size_t ia = a.index();
  const std::size_t ib = b.index();
  return a.tape()->record(
      std::move(out), {a, b},
      [ia, ib, a_scalar, b_scalar, dx, dy](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        const Tensor& x = tape.value(ia);
        const Tensor& y = tape.value(ib);
        const std::size_t n = g.size();
        if (needs(tape, ia)) {
          Tensor& gx = tape.grad_buffer(ia);
          for (std::size_t i = 0; i < n; ++i) {
            gx[a_scalar ? 0 : i] +=
                g[i] * dx(x[a_scalar ? 0 : i], y[b_scalar ? 0 : i]);
          }
        }
        if (needs(tape, ib)) {
          Tensor& gy = tape.grad_buffer(ib);
          for (std::size_t i = 0; i < n; ++i) {
            gy[b_scalar ? 0 : i] +=
                g[i] * dy(x[a_scalar ? 0 : i], y[b_scalar ? 0 : i]);
          }
        }
      });
}

// Elementwise unary op whose derivative is expressed through the input x and
// the output y.
template <typename Fwd, typename Deriv>
Var unary(Var a, Fwd fwd, Deriv deriv) {
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  const std::size_t ia = a.index();
  return a.tape()->record(
      std::move(out), {a}, [ia, deriv](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        const Tensor& x = tape.value(ia);
        const Tensor& y = tape.value(self);
        Tensor& gx = tape.grad_buffer(ia);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gx[i] += g[i] * deriv(x[i], y[i]);
        }
      });
}

}  // namespace

namespace linalg {

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions " +
                                    shape_string(a.shape()) + " and " +
                                    shape_string(b.shape()) + " disagree");
  Tensor out({a.rows(), b.cols()});
  as_matrix(out).noalias() = as_matrix(a) * as_matrix(b);
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out({a.cols(), a.rows()});
  as_matrix(out) = as_matrix(a).transpose();
  return out;
}

CholeskyResult cholesky(const Tensor& m) {
  require(m.rank() == 2 && m.rows() == m.cols(),
          "cholesky: expected a square matrix, got " + shape_string(m.shape()));
  const std::size_t n = m.rows();
  CholeskyResult result;
  result.lower = Tensor({n, n});
  Tensor& l = result.lower;
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = m.at(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l.at(j, k) * l.at(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      result.positive_definite = false;
      result.failed_index = j;
      result.failed_pivot = pivot;
      return result;
    }
    const double d = std::sqrt(pivot);
    l.at(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.5 * (m.at(i, j) + m.at(j, i));
      for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      l.at(i, j) = s / d;
    }
  }
  result.positive_definite = true;
  return result;
}

Tensor cholesky_inverse(const Tensor& lower) {
  const auto n = static_cast<Eigen::Index>(lower.rows());
  RowMat linv = RowMat::Identity(n, n);
  as_matrix(lower).triangularView<Eigen::Lower>().solveInPlace(linv);
  Tensor out({lower.rows(), lower.rows()});
  as_matrix(out).noalias() = linv.transpose() * linv;
  return out;
}

}  // namespace linalg

Var matmul(Var a, Var b) {
  Tensor out = linalg::matmul(a.value(), b.value());
  const std::size_t ia = a.index();
  const std::size_t ib = b.index();
  return a.tape()->record(
      std::move(out), {a, b}, [ia, ib](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        if (needs(tape, ia)) {
          Tensor& ga = tape.grad_buffer(ia);
          as_matrix(ga).noalias() +=
              as_matrix(g) * as_matrix(tape.value(ib)).transpose();
        }
        if (needs(tape, ib)) {
          Tensor& gb = tape.grad_buffer(ib);
          as_matrix(gb).noalias() +=
              as_matrix(tape.value(ia)).transpose() * as_matrix(g);
        }
      });
}

Var transpose(Var a) {
  const std::size_t ia = a.index();
  return a.tape()->record(
      linalg::transpose(a.value()), {a}, [ia](Tape& tape, std::size_t self) {
        Tensor& ga = tape.grad_buffer(ia);
        as_matrix(ga) += as_matrix(tape.grad(self)).transpose();
      });
}

Var add(Var a, Var b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Var scale(Var a, double factor) {
  return unary(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Var add_scalar(Var a, double offset) {
  return unary(
      a, [offset](double x) { return x + offset; },
      [](double, double) { return 1.0; });
}

Var neg(Var a) { return scale(a, -1.0); }

Var add_row(Var x, Var bias) {
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  require(bv.size() == xv.cols(), "add_row: bias " + shape_string(bv.shape()) +
                                      " does not match " +
                                      shape_string(xv.shape()));
  Tensor out = xv;
  const std::size_t rows = xv.rows();
  const std::size_t cols = xv.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bv[c];
  }
  const std::size_t ix = x.index();
  const std::size_t ib = bias.index();
  return x.tape()->record(
      std::move(out), {x, bias},
      [ix, ib, rows, cols](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        if (needs(tape, ix)) {
          Tensor& gx = tape.grad_buffer(ix);
          for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
        }
        if (needs(tape, ib)) {
          Tensor& gb = tape.grad_buffer(ib);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
          }
        }
      });
}

Var relu(Var x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var hinge(Var x) { return relu(x); }

Var tanh(Var x) {
  return unary(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var x) {
  return unary(
      x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Var square(Var x) {
  return unary(
      x, [](double v) { return v * v; },
      [](double v, double) { return 2.0 * v; });
}

Var sum(Var x) {
  const Tensor& xv = x.value();
  double total = 0.0;
  for (double v : xv.data()) total += v;
  const std::size_t ix = x.index();
  return x.tape()->record(Tensor::scalar(total), {x},
                          [ix](Tape& tape, std::size_t self) {
                            const double g = tape.grad(self)[0];
                            Tensor& gx = tape.grad_buffer(ix);
                            for (double& v : gx.data()) v += g;
                          });
}

Var mean(Var x) {
  const std::size_t n = x.value().size();
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

Var l2norm(Var x) {
  const Tensor& xv = x.value();
  double ss = 0.0;
  for (double v : xv.data()) ss += v * v;
  const double norm = std::sqrt(ss);
  const std::size_t ix = x.index();
  return x.tape()->record(
      Tensor::scalar(norm), {x}, [ix, norm](Tape& tape, std::size_t self) {
        if (norm == 0.0) return;
        const double g = tape.grad(self)[0] / norm;
        const Tensor& xv = tape.value(ix);
        Tensor& gx = tape.grad_buffer(ix);
        for (std::size_t i = 0; i < xv.size(); ++i) gx[i] += g * xv[i];
      });
}

Var row_norms(Var x) {
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows();
  const std::size_t cols = xv.cols();
  Tensor out({rows, 1});
  for (std::size_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (std::size_t c = 0; c < cols; ++c) ss += xv[r * cols + c] * xv[r * cols + c];
    out[r] = std::sqrt(ss);
  }
  const std::size_t ix = x.index();
  return x.tape()->record(
      std::move(out), {x}, [ix, rows, cols](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        const Tensor& y = tape.value(self);
        const Tensor& xv = tape.value(ix);
        Tensor& gx = tape.grad_buffer(ix);
        for (std::size_t r = 0; r < rows; ++r) {
          if (y[r] == 0.0) continue;
          const double s = g[r] / y[r];
          for (std::size_t c = 0; c < cols; ++c) {
            gx[r * cols + c] += s * xv[r * cols + c];
          }
        }
      });
}

Var concat_cols(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.rows() == bv.rows(), "concat_cols: row counts " +
                                      shape_string(av.shape()) + " vs " +
                                      shape_string(bv.shape()));
  const std::size_t rows = av.rows();
  const std::size_t ca = av.cols();
  const std::size_t cb = bv.cols();
  Tensor out({rows, ca + cb});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < ca; ++c) out.at(r, c) = av[r * ca + c];
    for (std::size_t c = 0; c < cb; ++c) out.at(r, ca + c) = bv[r * cb + c];
  }
  const std::size_t ia = a.index();
  const std::size_t ib = b.index();
  return a.tape()->record(
      std::move(out), {a, b},
      [ia, ib, rows, ca, cb](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        if (needs(tape, ia)) {
          Tensor& ga = tape.grad_buffer(ia);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < ca; ++c) ga[r * ca + c] += g.at(r, c);
          }
        }
        if (needs(tape, ib)) {
          Tensor& gb = tape.grad_buffer(ib);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cb; ++c) {
              gb[r * cb + c] += g.at(r, ca + c);
            }
          }
        }
      });
}

Var concat_rows(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.cols() == bv.cols(), "concat_rows: column counts " +
                                      shape_string(av.shape()) + " vs " +
                                      shape_string(bv.shape()));
  std::vector<double> data(av.data().begin(), av.data().end());
  data.insert(data.end(), bv.data().begin(), bv.data().end());
  const std::size_t na = av.size();
  const std::size_t ia = a.index();
  const std::size_t ib = b.index();
  return a.tape()->record(
      Tensor({av.rows() + bv.rows(), av.cols()}, std::move(data)), {a, b},
      [ia, ib, na](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        if (needs(tape, ia)) {
          Tensor& ga = tape.grad_buffer(ia);
          for (std::size_t i = 0; i < na; ++i) ga[i] += g[i];
        }
        if (needs(tape, ib)) {
          Tensor& gb = tape.grad_buffer(ib);
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[na + i];
        }
      });
}

Var slice_rows(Var x, std::size_t begin, std::size_t end) {
  const Tensor& xv = x.value();
  require(begin <= end && end <= xv.rows(),
          "slice_rows: range [" + std::to_string(begin) + ", " +
              std::to_string(end) + ") outside " + shape_string(xv.shape()));
  const std::size_t cols = xv.cols();
  std::vector<double> data(xv.data().begin() + begin * cols,
                           xv.data().begin() + end * cols);
  const std::size_t ix = x.index();
  return x.tape()->record(
      Tensor({end - begin, cols}, std::move(data)), {x},
      [ix, begin, cols](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        Tensor& gx = tape.grad_buffer(ix);
        for (std::size_t i = 0; i < g.size(); ++i) gx[begin * cols + i] += g[i];
      });
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
  const Tensor& xv = x.value();
  require(begin <= end && end <= xv.cols(),
          "slice_cols: range [" + std::to_string(begin) + ", " +
              std::to_string(end) + ") outside " + shape_string(xv.shape()));
  const std::size_t rows = xv.rows();
  const std::size_t cols = xv.cols();
  const std::size_t w = end - begin;
  Tensor out({rows, w});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < w; ++c) out.at(r, c) = xv[r * cols + begin + c];
  }
  const std::size_t ix = x.index();
  return x.tape()->record(
      std::move(out), {x}, [ix, begin, rows, cols, w](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        Tensor& gx = tape.grad_buffer(ix);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < w; ++c) {
            gx[r * cols + begin + c] += g[r * w + c];
          }
        }
      });
}

Var place(Var x, std::size_t rows, std::size_t cols, std::size_t r0,
          std::size_t c0) {
  const Tensor& xv = x.value();
  const std::size_t xr = xv.rows();
  const std::size_t xc = xv.cols();
  require(r0 + xr <= rows && c0 + xc <= cols,
          "place: block " + shape_string(xv.shape()) + " at (" +
              std::to_string(r0) + ", " + std::to_string(c0) +
              ") exceeds target " + std::to_string(rows) + "x" +
              std::to_string(cols));
  Tensor out({rows, cols});
  for (std::size_t r = 0; r < xr; ++r) {
    for (std::size_t c = 0; c < xc; ++c) out.at(r0 + r, c0 + c) = xv[r * xc + c];
  }
  const std::size_t ix = x.index();
  return x.tape()->record(
      std::move(out), {x}, [ix, xr, xc, r0, c0](Tape& tape, std::size_t self) {
        const Tensor& g = tape.grad(self);
        Tensor& gx = tape.grad_buffer(ix);
        for (std::size_t r = 0; r < xr; ++r) {
          for (std::size_t c = 0; c < xc; ++c) {
            gx[r * xc + c] += g.at(r0 + r, c0 + c);
          }
        }
      });
}

Var diag(Var x) {
  const Tensor& xv = x.value();
  const std::size_t n = xv.size();
  Tensor out({n, n});
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = xv[i];
  const std::size_t ix = x.index();
  return x.tape()->record(std::move(out), {x},
                          [ix, n](Tape& tape, std::size_t self) {
                            const Tensor& g = tape.grad(self);
                            Tensor& gx = tape.grad_buffer(ix);
                            for (std::size_t i = 0; i < n; ++i) {
                              gx[i] += g.at(i, i);
                            }
                          });
}

Var logdet(Var m) {
  linalg::CholeskyResult chol = linalg::cholesky(m.value());
  if (!chol.positive_definite) {
    throw NotPositiveDefinite(chol.failed_index, chol.failed_pivot);
  }
  const std::size_t n = m.value().rows();
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) value += 2.0 * std::log(chol.lower.at(i, i));
  auto lower = std::make_shared<Tensor>(std::move(chol.lower));
  const std::size_t im = m.index();
  return m.tape()->record(
      Tensor::scalar(value), {m}, [im, lower](Tape& tape, std::size_t self) {
        const double g = tape.grad(self)[0];
        const Tensor inv = linalg::cholesky_inverse(*lower);
        Tensor& gm = tape.grad_buffer(im);
        for (std::size_t i = 0; i < inv.size(); ++i) gm[i] += g * inv[i];
      });
}

Var pivot_deficit(Var m) {
  const Tensor& mv = m.value();
  linalg::CholeskyResult chol = linalg::cholesky(mv);
  const std::size_t im = m.index();
  if (chol.positive_definite) {
    return m.tape()->record(Tensor::scalar(0.0), {m},
                            [](Tape&, std::size_t) {});
  }
  const std::size_t k = chol.failed_index;
  // d_k = S_kk - s^T S_<k^{-1} s with s = S[0:k, k]; w = S_<k^{-1} s.
  std::vector<double> w(k, 0.0);
  if (k > 0) {
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::VectorXd s(kk);
    for (std::size_t i = 0; i < k; ++i) s[i] = 0.5 * (mv.at(i, k) + mv.at(k, i));
    const ConstMap full = as_matrix(std::as_const(chol.lower));
    const RowMat lk = full.topLeftCorner(kk, kk);
    Eigen::VectorXd y = lk.triangularView<Eigen::Lower>().solve(s);
    Eigen::VectorXd sol =
        lk.transpose().triangularView<Eigen::Upper>().solve(y);
    for (std::size_t i = 0; i < k; ++i) w[i] = sol[i];
  }
  const double deficit = -chol.failed_pivot;
  return m.tape()->record(
      Tensor::scalar(deficit), {m}, [im, k, w](Tape& tape, std::size_t self) {
        const double g = tape.grad(self)[0];
        Tensor& gm = tape.grad_buffer(im);
        // d(-d_k)/dS_kk = -1, d/dS_ik = d/dS_ki = w_i (symmetric split),
        // d/dS_ij = -w_i w_j on the leading block.
        gm.at(k, k) += -g;
        for (std::size_t i = 0; i < k; ++i) {
          gm.at(i, k) += g * w[i];
          gm.at(k, i) += g * w[i];
          for (std::size_t j = 0; j < k; ++j) gm.at(i, j) += -g * w[i] * w[j];
        }
      });
}

}  // namespace salad::tensor
