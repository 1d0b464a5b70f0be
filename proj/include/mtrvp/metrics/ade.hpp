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

#ifndef MTRVP__METRICS__ADE_HPP_
#define MTRVP__METRICS__ADE_HPP_

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "mtrvp/core/types.hpp"
#include "mtrvp/metrics/rfs.hpp"
#include "mtrvp/model/decoder.hpp"

namespace mtrvp::metrics
{

/// Mean waypoint L2 distance over the first T seconds (indices 0 .. 4T-1).
inline double ade(const Trajectory & pred, const Trajectory & target, int t)
{
  const std::size_t last = horizon_index(t);
  if (pred.size() <= last || target.size() <= last) {
    throw std::invalid_argument("ade: trajectory shorter than " + std::to_string(t) + " s");
  }
  double total = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    total += norm(pred[i] - target[i]);
  }
  return total / static_cast<double>(last + 1);
}

/// Minimum ADE over the k most probable modes.
inline double ade_topk(const PredictionSet & preds, const Trajectory & target, std::size_t k, int t)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & m : model::select_topk(preds, k)) {
    best = std::min(best, ade(m.trajectory, target, t));
  }
  return best;
}

}  // namespace mtrvp::metrics

#endif  // MTRVP__METRICS__ADE_HPP_
