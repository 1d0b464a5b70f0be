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

#ifndef MTRVP__DIFFMATH__ATTENTION_HPP_
#define MTRVP__DIFFMATH__ATTENTION_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mtrvp/diffmath/ops.hpp"

namespace mtrvp::diffmath
{

/**
 * @brief Fused multi-head scaled dot-product attention.
 *
 * q: [B x Lq x D], k: [B x Lk x D], v: [B x Lk x Dv]. Head h reads columns
 * [h*D/heads, (h+1)*D/heads) of q and k and the matching slice of v. Scores
 * are scaled by 1/sqrt(D/heads). Output is [B x Lq x Dv] with heads laid out
 * contiguously, i.e. already concatenated.
 */
inline Tensor scaled_dot_product_attention(
  Tape & tape, const Tensor & q, const Tensor & k, const Tensor & v, std::size_t heads)
{
  detail::require(q.rank() == 3 && k.rank() == 3 && v.rank() == 3, "attention: inputs must be 3-D");
  const std::size_t batch = q.dim(0);
  const std::size_t lq = q.dim(1);
  const std::size_t lk = k.dim(1);
  const std::size_t d = q.dim(2);
  const std::size_t dv = v.dim(2);
  detail::require(
    k.dim(0) == batch && v.dim(0) == batch && k.dim(2) == d && v.dim(1) == lk,
    "attention: shape mismatch q" + shape_str(q.shape()) + " k" + shape_str(k.shape()) + " v" +
      shape_str(v.shape()));
  detail::require(
    heads > 0 && d % heads == 0 && dv % heads == 0,
    "attention: " + std::to_string(heads) + " heads do not divide widths " + std::to_string(d) +
      "/" + std::to_string(dv));
  const std::size_t dh = d / heads;
  const std::size_t dvh = dv / heads;
  const Real inv = 1.0 / std::sqrt(static_cast<Real>(dh));

  const bool rg = q.requires_grad() || k.requires_grad() || v.requires_grad();
  Tensor out = detail::make_output({batch, lq, dv}, rg);
  // attention weights, [B x heads x Lq x Lk]
  std::vector<Real> weights(batch * heads * lq * lk);
  std::vector<Real> row(lk);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < lq; ++i) {
        const Real * qi = q.ptr() + (b * lq + i) * d + h * dh;
        Real mx = -std::numeric_limits<Real>::infinity();
        for (std::size_t j = 0; j < lk; ++j) {
          const Real * kj = k.ptr() + (b * lk + j) * d + h * dh;
          Real s = 0.0;
          for (std::size_t c = 0; c < dh; ++c) {
            s += qi[c] * kj[c];
          }
          row[j] = s * inv;
          mx = std::max(mx, row[j]);
        }
        Real total = 0.0;
        for (std::size_t j = 0; j < lk; ++j) {
          row[j] = std::exp(row[j] - mx);
          total += row[j];
        }
        Real * w = weights.data() + ((b * heads + h) * lq + i) * lk;
        Real * oi = out.ptr() + (b * lq + i) * dv + h * dvh;
        for (std::size_t j = 0; j < lk; ++j) {
          w[j] = row[j] / total;
          const Real * vj = v.ptr() + (b * lk + j) * dv + h * dvh;
          for (std::size_t c = 0; c < dvh; ++c) {
            oi[c] += w[j] * vj[c];
          }
        }
      }
    }
  }
  if (rg) {
    tape.record(
      out, [q = q, k = k, v = v, out, weights = std::move(weights), batch, heads, lq, lk, d, dv, dh, dvh,
            inv]() mutable {
        const Real * go = out.grad().data();
        Real * gq = q.requires_grad() ? q.grad().data() : nullptr;
        Real * gk = k.requires_grad() ? k.grad().data() : nullptr;
        Real * gv = v.requires_grad() ? v.grad().data() : nullptr;
        std::vector<Real> dscore(lk);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t h = 0; h < heads; ++h) {
            for (std::size_t i = 0; i < lq; ++i) {
              const Real * w = weights.data() + ((b * heads + h) * lq + i) * lk;
              const Real * goi = go + (b * lq + i) * dv + h * dvh;
              Real wdot = 0.0;
              for (std::size_t j = 0; j < lk; ++j) {
                const Real * vj = v.ptr() + (b * lk + j) * dv + h * dvh;
                Real da = 0.0;
                for (std::size_t c = 0; c < dvh; ++c) {
                  da += goi[c] * vj[c];
                }
                dscore[j] = da;
                wdot += w[j] * da;
                if (gv) {
                  Real * gvj = gv + (b * lk + j) * dv + h * dvh;
                  for (std::size_t c = 0; c < dvh; ++c) {
                    gvj[c] += w[j] * goi[c];
                  }
                }
              }
              const Real * qi = q.ptr() + (b * lq + i) * d + h * dh;
              Real * gqi = gq ? gq + (b * lq + i) * d + h * dh : nullptr;
              for (std::size_t j = 0; j < lk; ++j) {
                const Real ds = w[j] * (dscore[j] - wdot) * inv;
                const Real * kj = k.ptr() + (b * lk + j) * d + h * dh;
                if (gqi) {
                  for (std::size_t c = 0; c < dh; ++c) {
                    gqi[c] += ds * kj[c];
                  }
                }
                if (gk) {
                  Real * gkj = gk + (b * lk + j) * d + h * dh;
                  for (std::size_t c = 0; c < dh; ++c) {
                    gkj[c] += ds * qi[c];
                  }
                }
              }
            }
          }
        }
      });
  }
  return out;
}

/// Weights of one attention block; W* stored [in x out].
struct ProjectionParams
{
  Tensor wq, bq;
  Tensor wk, bk;
  Tensor wv, bv;
  Tensor wo, bo;
};

/**
 * @brief Multi-head attention: project q/k/v, attend per head, concatenate,
 * then apply the output projection.
 */
inline Tensor multi_head_attention(
  Tape & tape, const Tensor & q, const Tensor & k, const Tensor & v, const ProjectionParams & p,
  std::size_t heads)
{
  const Tensor qp = linear(tape, q, p.wq, p.bq);
  const Tensor kp = linear(tape, k, p.wk, p.bk);
  const Tensor vp = linear(tape, v, p.wv, p.bv);
  const Tensor att = scaled_dot_product_attention(tape, qp, kp, vp, heads);
  return linear(tape, att, p.wo, p.bo);
}

}  // namespace mtrvp::diffmath

#endif  // MTRVP__DIFFMATH__ATTENTION_HPP_
