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

// Winner-take-all loss for multimodal trajectory heads:
//
//   loss = -log p[c] + lambda * mean_t |mode_c(t) - target(t)|^2
//
// where c is the mode with the smallest mean waypoint displacement to the
// target (ties -> lowest index). The argmin is a constant for the step, so
// the regression term only reaches mode c.

#ifndef MTRVP__TRAINING__WTA_LOSS_HPP_
#define MTRVP__TRAINING__WTA_LOSS_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "mtrvp/core/types.hpp"
#include "mtrvp/diffmath/ops.hpp"
#include "mtrvp/model/decoder.hpp"

namespace mtrvp::training
{

using diffmath::Tensor;

/// Mean Euclidean waypoint distance over the common length.
inline double mean_displacement(const Trajectory & a, const Trajectory & b)
{
  const std::size_t n = std::min(a.size(), b.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += norm(a[i] - b[i]);
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

inline std::size_t closest_mode(const std::vector<Trajectory> & modes, const Trajectory & target)
{
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double d = mean_displacement(modes[k], target);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

struct WtaLoss
{
  double loss;
  std::size_t closest;
  double cross_entropy;
  double regression;
};

/// Value-only form on a single prediction set.
inline WtaLoss wta_loss(const PredictionSet & pred, const Trajectory & target, double lambda = 1.0)
{
  check_prediction_set(pred);
  const std::size_t c = closest_mode(pred.modes, target);
  const double ce = -std::log(pred.probs[c]);
  double reg = 0.0;
  const auto & mode = pred.modes[c];
  for (std::size_t t = 0; t < target.size(); ++t) {
    const Vec2 d = mode[t] - target[t];
    reg += d.x * d.x + d.y * d.y;
  }
  reg /= static_cast<double>(target.size());
  return {ce + lambda * reg, c, ce, reg};
}

struct BatchWtaLoss
{
  Tensor loss;  // scalar, mean over the batch
  std::vector<std::size_t> closest;
};

/**
 * @brief Differentiable batch form over a decoder output.
 *
 * Cross-entropy uses log-softmax of the logits, so it stays finite even when
 * the softmax saturates.
 */
inline BatchWtaLoss wta_loss(
  diffmath::Tape & tape, const model::DecoderOutput & out, const std::vector<Trajectory> & targets,
  double lambda = 1.0)
{
  using namespace diffmath;
  const std::size_t batch = out.trajectories.dim(0);
  const std::size_t k = out.trajectories.dim(1);
  const std::size_t horizon = out.trajectories.dim(2);
  if (targets.size() != batch) {
    throw ShapeError("wta_loss: one target per sample required");
  }
  Tensor target({batch, horizon, 2});
  for (std::size_t b = 0; b < batch; ++b) {
    if (targets[b].size() != horizon) {
      throw ShapeError("wta_loss: target length does not match the horizon");
    }
    for (std::size_t t = 0; t < horizon; ++t) {
      target.ptr()[(b * horizon + t) * 2] = targets[b][t].x;
      target.ptr()[(b * horizon + t) * 2 + 1] = targets[b][t].y;
    }
  }
  std::vector<std::size_t> closest(batch, 0);
  const double * traj = out.trajectories.ptr();
  for (std::size_t b = 0; b < batch; ++b) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < k; ++m) {
      double total = 0.0;
      for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t i = ((b * k + m) * horizon + t) * 2;
        const std::size_t j = (b * horizon + t) * 2;
        total += std::hypot(traj[i] - target.ptr()[j], traj[i + 1] - target.ptr()[j + 1]);
      }
      const double d = total / static_cast<double>(horizon);
      if (d < best) {
        best = d;
        closest[b] = m;
      }
    }
  }
  const Tensor chosen = select_per_row(tape, out.trajectories, closest);
  const Tensor reg = scale(
    tape, sum_sq(tape, sub(tape, chosen, target)), 1.0 / static_cast<double>(batch * horizon));
  const Tensor picked = select_per_row(tape, log_softmax(tape, out.logits, 1), closest);
  const Tensor ce = scale(tape, sum(tape, picked), -1.0 / static_cast<double>(batch));
  return {add(tape, ce, scale(tape, reg, lambda)), std::move(closest)};
}

}  // namespace mtrvp::training

#endif  // MTRVP__TRAINING__WTA_LOSS_HPP_
