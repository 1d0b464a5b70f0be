// Copyright 2026 The mtrvp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Differentiable tensor operations. Each op computes its value eagerly and,
// when any input requires a gradient, records a backward rule on the tape.
// All reductions run in a fixed sequential order so gradients are bitwise
// reproducible.

#ifndef MTRVP__DIFFMATH__OPS_HPP_
#define MTRVP__DIFFMATH__OPS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mtrvp/diffmath/tape.hpp"
#include "mtrvp/diffmath/tensor.hpp"

namespace mtrvp::diffmath
{

namespace detail
{

inline Tensor make_output(Shape shape, bool requires_grad)
{
  return Tensor(std::move(shape), 0.0, requires_grad);
}

inline void require(bool cond, const std::string & msg)
{
  if (!cond) {
    throw ShapeError(msg);
  }
}

/// True when `suffix` equals the trailing dims of `shape`.
inline bool is_suffix(const Shape & shape, const Shape & suffix)
{
  if (suffix.size() > shape.size()) {
    return false;
  }
  return std::equal(suffix.rbegin(), suffix.rend(), shape.rbegin());
}

struct AxisSplit
{
  std::size_t outer;
  std::size_t n;
  std::size_t inner;
};

inline AxisSplit split_axis(const Shape & s, std::size_t axis)
{
  require(axis < s.size(), "axis " + std::to_string(axis) + " out of range for " + shape_str(s));
  AxisSplit a{1, s[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) {
    a.outer *= s[i];
  }
  for (std::size_t i = axis + 1; i < s.size(); ++i) {
    a.inner *= s[i];
  }
  return a;
}

// Row-major views; Eigen's kernels accumulate in a fixed order, so results
// are reproducible run to run on the same build.
using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

// c[m x n] += a[m x k] * b[k x n]
inline void gemm_nn(const Real * a, const Real * b, Real * c, std::size_t m, std::size_t k, std::size_t n)
{
  const auto M = static_cast<Eigen::Index>(m), K = static_cast<Eigen::Index>(k), N = static_cast<Eigen::Index>(n);
  MutMap(c, M, N).noalias() += ConstMap(a, M, K) * ConstMap(b, K, N);
}

// c[m x k] += a[m x n] * b[k x n]^T
inline void gemm_nt(const Real * a, const Real * b, Real * c, std::size_t m, std::size_t n, std::size_t k)
{
  const auto M = static_cast<Eigen::Index>(m), K = static_cast<Eigen::Index>(k), N = static_cast<Eigen::Index>(n);
  MutMap(c, M, K).noalias() += ConstMap(a, M, N) * ConstMap(b, K, N).transpose();
}

// c[k x n] += a[m x k]^T * b[m x n]
inline void gemm_tn(const Real * a, const Real * b, Real * c, std::size_t m, std::size_t k, std::size_t n)
{
  const auto M = static_cast<Eigen::Index>(m), K = static_cast<Eigen::Index>(k), N = static_cast<Eigen::Index>(n);
  MutMap(c, K, N).noalias() += ConstMap(a, M, K).transpose() * ConstMap(b, M, N);
}

}  // namespace detail

/// Elementwise sum. b may also match a trailing block of a's dims and is then
/// broadcast over the leading ones.
inline Tensor add(Tape & tape, const Tensor & a, const Tensor & b)
{
  detail::require(
    detail::is_suffix(a.shape(), b.shape()),
    "add: shape " + shape_str(b.shape()) + " does not broadcast to " + shape_str(a.shape()));
  Tensor out = detail::make_output(a.shape(), a.requires_grad() || b.requires_grad());
  const std::size_t n = a.numel();
  const std::size_t nb = b.numel();
  const Real * pa = a.ptr();
  const Real * pb = b.ptr();
  Real * po = out.ptr();
  for (std::size_t i = 0; i < n; i += nb) {
    for (std::size_t j = 0; j < nb; ++j) {
      po[i + j] = pa[i + j] + pb[j];
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [a = a, b = b, out, n, nb]() mutable {
      const auto go = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        for (std::size_t i = 0; i < n; ++i) {
          ga[i] += go[i];
        }
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < n; i += nb) {
          for (std::size_t j = 0; j < nb; ++j) {
            gb[j] += go[i + j];
          }
        }
      }
    });
  }
  return out;
}

/// Elementwise difference with the same broadcasting rule as add().
inline Tensor sub(Tape & tape, const Tensor & a, const Tensor & b)
{
  detail::require(
    detail::is_suffix(a.shape(), b.shape()),
    "sub: shape " + shape_str(b.shape()) + " does not broadcast to " + shape_str(a.shape()));
  Tensor out = detail::make_output(a.shape(), a.requires_grad() || b.requires_grad());
  const std::size_t n = a.numel();
  const std::size_t nb = b.numel();
  for (std::size_t i = 0; i < n; i += nb) {
    for (std::size_t j = 0; j < nb; ++j) {
      out.ptr()[i + j] = a.ptr()[i + j] - b.ptr()[j];
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [a = a, b = b, out, n, nb]() mutable {
      const auto go = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        for (std::size_t i = 0; i < n; ++i) {
          ga[i] += go[i];
        }
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < n; i += nb) {
          for (std::size_t j = 0; j < nb; ++j) {
            gb[j] -= go[i + j];
          }
        }
      }
    });
  }
  return out;
}

/// Elementwise product with the same broadcasting rule as add().
inline Tensor mul(Tape & tape, const Tensor & a, const Tensor & b)
{
  detail::require(
    detail::is_suffix(a.shape(), b.shape()),
    "mul: shape " + shape_str(b.shape()) + " does not broadcast to " + shape_str(a.shape()));
  Tensor out = detail::make_output(a.shape(), a.requires_grad() || b.requires_grad());
  const std::size_t n = a.numel();
  const std::size_t nb = b.numel();
  for (std::size_t i = 0; i < n; i += nb) {
    for (std::size_t j = 0; j < nb; ++j) {
      out.ptr()[i + j] = a.ptr()[i + j] * b.ptr()[j];
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [a = a, b = b, out, n, nb]() mutable {
      const auto go = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        for (std::size_t i = 0; i < n; i += nb) {
          for (std::size_t j = 0; j < nb; ++j) {
            ga[i + j] += go[i + j] * b.ptr()[j];
          }
        }
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < n; i += nb) {
          for (std::size_t j = 0; j < nb; ++j) {
            gb[j] += go[i + j] * a.ptr()[i + j];
          }
        }
      }
    });
  }
  return out;
}

inline Tensor scale(Tape & tape, const Tensor & a, Real s)
{
  Tensor out = detail::make_output(a.shape(), a.requires_grad());
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) {
    out.ptr()[i] = s * a.ptr()[i];
  }
  if (out.requires_grad()) {
    tape.record(out, [a = a, out, n, s]() mutable {
      const auto go = out.grad();
      auto ga = a.grad();
      for (std::size_t i = 0; i < n; ++i) {
        ga[i] += s * go[i];
      }
    });
  }
  return out;
}

inline Tensor relu(Tape & tape, const Tensor & a)
{
  Tensor out = detail::make_output(a.shape(), a.requires_grad());
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) {
    out.ptr()[i] = a.ptr()[i] > 0.0 ? a.ptr()[i] : 0.0;
  }
  if (out.requires_grad()) {
    tape.record(out, [a = a, out, n]() mutable {
      const auto go = out.grad();
      auto ga = a.grad();
      for (std::size_t i = 0; i < n; ++i) {
        if (a.ptr()[i] > 0.0) {
          ga[i] += go[i];
        }
      }
    });
  }
  return out;
}

/**
 * @brief Matrix product. Accepts [m x k]*[k x n] or the batched
 * [B x m x k]*[B x k x n].
 */
inline Tensor matmul(Tape & tape, const Tensor & a, const Tensor & b)
{
  const bool batched = a.rank() == 3;
  detail::require(
    (a.rank() == 2 && b.rank() == 2) || (a.rank() == 3 && b.rank() == 3),
    "matmul: unsupported ranks " + shape_str(a.shape()) + " * " + shape_str(b.shape()));
  const std::size_t batch = batched ? a.dim(0) : 1;
  const std::size_t m = a.dim(a.rank() - 2);
  const std::size_t k = a.dim(a.rank() - 1);
  const std::size_t n = b.dim(b.rank() - 1);
  detail::require(
    b.dim(b.rank() - 2) == k && (!batched || b.dim(0) == batch),
    "matmul: inner dims disagree " + shape_str(a.shape()) + " * " + shape_str(b.shape()));
  Shape shape = batched ? Shape{batch, m, n} : Shape{m, n};
  Tensor out = detail::make_output(shape, a.requires_grad() || b.requires_grad());
  for (std::size_t bi = 0; bi < batch; ++bi) {
    detail::gemm_nn(a.ptr() + bi * m * k, b.ptr() + bi * k * n, out.ptr() + bi * m * n, m, k, n);
  }
  if (out.requires_grad()) {
    tape.record(out, [a = a, b = b, out, batch, m, k, n]() mutable {
      const Real * go = out.grad().data();
      if (a.requires_grad()) {
        Real * ga = a.grad().data();
        for (std::size_t bi = 0; bi < batch; ++bi) {
          detail::gemm_nt(go + bi * m * n, b.ptr() + bi * k * n, ga + bi * m * k, m, n, k);
        }
      }
      if (b.requires_grad()) {
        Real * gb = b.grad().data();
        for (std::size_t bi = 0; bi < batch; ++bi) {
          detail::gemm_tn(a.ptr() + bi * m * k, go + bi * m * n, gb + bi * k * n, m, k, n);
        }
      }
    });
  }
  return out;
}

/**
 * @brief Affine map over the last dim: y = x W + b with W stored [in x out].
 *
 * `bias` may be an undefined tensor.
 */
inline Tensor linear(Tape & tape, const Tensor & x, const Tensor & weight, const Tensor & bias)
{
  detail::require(weight.rank() == 2, "linear: weight must be 2-D");
  const std::size_t in = weight.dim(0);
  const std::size_t outd = weight.dim(1);
  detail::require(
    x.rank() >= 1 && x.shape().back() == in,
    "linear: input " + shape_str(x.shape()) + " does not match weight " + shape_str(weight.shape()));
  const bool has_bias = bias.defined();
  if (has_bias) {
    detail::require(bias.numel() == outd, "linear: bias width mismatch");
  }
  const std::size_t rows = x.numel() / in;
  Shape shape = x.shape();
  shape.back() = outd;
  const bool rg = x.requires_grad() || weight.requires_grad() || (has_bias && bias.requires_grad());
  Tensor out = detail::make_output(std::move(shape), rg);
  Real * po = out.ptr();
  if (has_bias) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(bias.ptr(), outd, po + r * outd);
    }
  }
  detail::gemm_nn(x.ptr(), weight.ptr(), po, rows, in, outd);
  if (rg) {
    tape.record(out, [x = x, weight = weight, bias = bias, out, rows, in, outd, has_bias]() mutable {
      const Real * go = out.grad().data();
      if (x.requires_grad()) {
        detail::gemm_nt(go, weight.ptr(), x.grad().data(), rows, outd, in);
      }
      if (weight.requires_grad()) {
        detail::gemm_tn(x.ptr(), go, weight.grad().data(), rows, in, outd);
      }
      if (has_bias && bias.requires_grad()) {
        auto gb = bias.grad();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < outd; ++j) {
            gb[j] += go[r * outd + j];
          }
        }
      }
    });
  }
  return out;
}

/// Softmax along `axis`, stabilised by subtracting the per-slice maximum.
inline Tensor softmax(Tape & tape, const Tensor & x, std::size_t axis)
{
  const auto s = detail::split_axis(x.shape(), axis);
  Tensor out = detail::make_output(x.shape(), x.requires_grad());
  const Real * px = x.ptr();
  Real * py = out.ptr();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.n * s.inner + in;
      Real mx = -std::numeric_limits<Real>::infinity();
      for (std::size_t j = 0; j < s.n; ++j) {
        mx = std::max(mx, px[base + j * s.inner]);
      }
      Real total = 0.0;
      for (std::size_t j = 0; j < s.n; ++j) {
        const Real e = std::exp(px[base + j * s.inner] - mx);
        py[base + j * s.inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < s.n; ++j) {
        py[base + j * s.inner] /= total;
      }
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [x = x, out, s]() mutable {
      const Real * go = out.grad().data();
      const Real * py = out.ptr();
      Real * gx = x.grad().data();
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t in = 0; in < s.inner; ++in) {
          const std::size_t base = o * s.n * s.inner + in;
          Real dotp = 0.0;
          for (std::size_t j = 0; j < s.n; ++j) {
            dotp += py[base + j * s.inner] * go[base + j * s.inner];
          }
          for (std::size_t j = 0; j < s.n; ++j) {
            const std::size_t idx = base + j * s.inner;
            gx[idx] += py[idx] * (go[idx] - dotp);
          }
        }
      }
    });
  }
  return out;
}

/// log(softmax(x)) along `axis`, computed without forming the probabilities.
inline Tensor log_softmax(Tape & tape, const Tensor & x, std::size_t axis)
{
  const auto s = detail::split_axis(x.shape(), axis);
  Tensor out = detail::make_output(x.shape(), x.requires_grad());
  const Real * px = x.ptr();
  Real * py = out.ptr();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.n * s.inner + in;
      Real mx = -std::numeric_limits<Real>::infinity();
      for (std::size_t j = 0; j < s.n; ++j) {
        mx = std::max(mx, px[base + j * s.inner]);
      }
      Real total = 0.0;
      for (std::size_t j = 0; j < s.n; ++j) {
        total += std::exp(px[base + j * s.inner] - mx);
      }
      const Real lse = mx + std::log(total);
      for (std::size_t j = 0; j < s.n; ++j) {
        py[base + j * s.inner] = px[base + j * s.inner] - lse;
      }
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [x = x, out, s]() mutable {
      const Real * go = out.grad().data();
      const Real * py = out.ptr();
      Real * gx = x.grad().data();
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t in = 0; in < s.inner; ++in) {
          const std::size_t base = o * s.n * s.inner + in;
          Real total = 0.0;
          for (std::size_t j = 0; j < s.n; ++j) {
            total += go[base + j * s.inner];
          }
          for (std::size_t j = 0; j < s.n; ++j) {
            const std::size_t idx = base + j * s.inner;
            gx[idx] += go[idx] - std::exp(py[idx]) * total;
          }
        }
      }
    });
  }
  return out;
}

/**
 * @brief Layer normalisation over the last dim with learned gain and bias.
 */
inline Tensor layer_norm(
  Tape & tape, const Tensor & x, const Tensor & gain, const Tensor & bias, Real eps = 1e-5)
{
  const std::size_t d = x.shape().back();
  detail::require(
    gain.numel() == d && bias.numel() == d,
    "layer_norm: gain/bias width must be " + std::to_string(d));
  const std::size_t rows = x.numel() / d;
  const bool rg = x.requires_grad() || gain.requires_grad() || bias.requires_grad();
  Tensor out = detail::make_output(x.shape(), rg);
  std::vector<Real> xhat(x.numel());
  std::vector<Real> rstd(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const Real * xr = x.ptr() + r * d;
    Real mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      mean += xr[j];
    }
    mean /= static_cast<Real>(d);
    Real var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      var += (xr[j] - mean) * (xr[j] - mean);
    }
    var /= static_cast<Real>(d);
    rstd[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      xhat[r * d + j] = (xr[j] - mean) * rstd[r];
      out.ptr()[r * d + j] = xhat[r * d + j] * gain.ptr()[j] + bias.ptr()[j];
    }
  }
  if (rg) {
    tape.record(
      out, [x = x, gain = gain, bias = bias, out, xhat = std::move(xhat), rstd = std::move(rstd), rows, d]() mutable {
        const Real * go = out.grad().data();
        if (gain.requires_grad()) {
          auto gg = gain.grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < d; ++j) {
              gg[j] += go[r * d + j] * xhat[r * d + j];
            }
          }
        }
        if (bias.requires_grad()) {
          auto gb = bias.grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < d; ++j) {
              gb[j] += go[r * d + j];
            }
          }
        }
        if (x.requires_grad()) {
          Real * gx = x.grad().data();
          const Real inv_d = 1.0 / static_cast<Real>(d);
          for (std::size_t r = 0; r < rows; ++r) {
            Real m1 = 0.0;
            Real m2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const Real gh = go[r * d + j] * gain.ptr()[j];
              m1 += gh;
              m2 += gh * xhat[r * d + j];
            }
            m1 *= inv_d;
            m2 *= inv_d;
            for (std::size_t j = 0; j < d; ++j) {
              const Real gh = go[r * d + j] * gain.ptr()[j];
              gx[r * d + j] += rstd[r] * (gh - m1 - xhat[r * d + j] * m2);
            }
          }
        }
      });
  }
  return out;
}

inline Tensor sum(Tape & tape, const Tensor & x)
{
  Tensor out = detail::make_output({1}, x.requires_grad());
  Real total = 0.0;
  for (Real v : x.data()) {
    total += v;
  }
  out.ptr()[0] = total;
  if (out.requires_grad()) {
    tape.record(out, [x = x, out]() mutable {
      const Real g = out.grad()[0];
      for (auto & gx : x.grad()) {
        gx += g;
      }
    });
  }
  return out;
}

inline Tensor mean(Tape & tape, const Tensor & x)
{
  return scale(tape, sum(tape, x), 1.0 / static_cast<Real>(x.numel()));
}

/// Sum of squared entries.
inline Tensor sum_sq(Tape & tape, const Tensor & x)
{
  Tensor out = detail::make_output({1}, x.requires_grad());
  Real total = 0.0;
  for (Real v : x.data()) {
    total += v * v;
  }
  out.ptr()[0] = total;
  if (out.requires_grad()) {
    tape.record(out, [x = x, out]() mutable {
      const Real g = out.grad()[0];
      auto gx = x.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) {
        gx[i] += 2.0 * g * x.ptr()[i];
      }
    });
  }
  return out;
}

inline Tensor reshape(Tape & tape, const Tensor & x, Shape shape)
{
  detail::require(
    shape_numel(shape) == x.numel(),
    "reshape: " + shape_str(x.shape()) + " cannot become " + shape_str(shape));
  Tensor out = Tensor::from(std::move(shape), std::vector<Real>(x.data().begin(), x.data().end()),
                            x.requires_grad());
  if (out.requires_grad()) {
    tape.record(out, [x = x, out]() mutable {
      auto gx = x.grad();
      const auto go = out.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) {
        gx[i] += go[i];
      }
    });
  }
  return out;
}

/// Concatenation along `axis`; all other dims must agree.
inline Tensor concat(Tape & tape, const std::vector<Tensor> & parts, std::size_t axis)
{
  detail::require(!parts.empty(), "concat: no inputs");
  Shape shape = parts.front().shape();
  detail::require(axis < shape.size(), "concat: axis out of range");
  std::size_t total = 0;
  bool rg = false;
  for (const auto & p : parts) {
    Shape a = p.shape();
    Shape b = shape;
    detail::require(a.size() == b.size(), "concat: rank mismatch");
    a[axis] = b[axis] = 0;
    detail::require(a == b, "concat: shape mismatch " + shape_str(p.shape()) + " vs " + shape_str(shape));
    total += p.dim(axis);
    rg = rg || p.requires_grad();
  }
  shape[axis] = total;
  const auto s = detail::split_axis(shape, axis);
  Tensor out = detail::make_output(shape, rg);
  std::size_t offset = 0;
  for (const auto & p : parts) {
    const std::size_t block = p.dim(axis) * s.inner;
    for (std::size_t o = 0; o < s.outer; ++o) {
      std::copy_n(p.ptr() + o * block, block, out.ptr() + o * total * s.inner + offset);
    }
    offset += block;
  }
  if (rg) {
    tape.record(out, [parts = std::vector<Tensor>(parts), out, s, total, axis]() mutable {
      const Real * go = out.grad().data();
      std::size_t offset = 0;
      for (auto & p : parts) {
        const std::size_t block = p.dim(axis) * s.inner;
        if (p.requires_grad()) {
          Real * gp = p.grad().data();
          for (std::size_t o = 0; o < s.outer; ++o) {
            for (std::size_t j = 0; j < block; ++j) {
              gp[o * block + j] += go[o * total * s.inner + offset + j];
            }
          }
        }
        offset += block;
      }
    });
  }
  return out;
}

/// Inclusive prefix sum along `axis`.
inline Tensor cumsum(Tape & tape, const Tensor & x, std::size_t axis)
{
  const auto s = detail::split_axis(x.shape(), axis);
  Tensor out = detail::make_output(x.shape(), x.requires_grad());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.n * s.inner + in;
      Real acc = 0.0;
      for (std::size_t j = 0; j < s.n; ++j) {
        acc += x.ptr()[base + j * s.inner];
        out.ptr()[base + j * s.inner] = acc;
      }
    }
  }
  if (out.requires_grad()) {
    tape.record(out, [x = x, out, s]() mutable {
      const Real * go = out.grad().data();
      Real * gx = x.grad().data();
      for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t in = 0; in < s.inner; ++in) {
          const std::size_t base = o * s.n * s.inner + in;
          Real acc = 0.0;
          for (std::size_t j = s.n; j-- > 0;) {
            acc += go[base + j * s.inner];
            gx[base + j * s.inner] += acc;
          }
        }
      }
    });
  }
  return out;
}

/**
 * @brief For x of shape [B x K x ...], picks x[b, index[b], ...] for every b.
 *
 * Result has shape [B x ...] ([B] when x is 2-D). Gradient only reaches the
 * selected slices.
 */
inline Tensor select_per_row(Tape & tape, const Tensor & x, const std::vector<std::size_t> & index)
{
  detail::require(x.rank() >= 2, "select_per_row: need rank >= 2");
  const std::size_t batch = x.dim(0);
  const std::size_t k = x.dim(1);
  detail::require(index.size() == batch, "select_per_row: one index per row required");
  const std::size_t block = x.numel() / (batch * k);
  Shape shape{batch};
  shape.insert(shape.end(), x.shape().begin() + 2, x.shape().end());
  Tensor out = detail::make_output(std::move(shape), x.requires_grad());
  for (std::size_t b = 0; b < batch; ++b) {
    detail::require(index[b] < k, "select_per_row: index out of range");
    std::copy_n(x.ptr() + (b * k + index[b]) * block, block, out.ptr() + b * block);
  }
  if (out.requires_grad()) {
    tape.record(out, [x = x, out, index, k, block, batch]() mutable {
      const Real * go = out.grad().data();
      Real * gx = x.grad().data();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < block; ++j) {
          gx[(b * k + index[b]) * block + j] += go[b * block + j];
        }
      }
    });
  }
  return out;
}

}  // namespace mtrvp::diffmath

#endif  // MTRVP__DIFFMATH__OPS_HPP_
