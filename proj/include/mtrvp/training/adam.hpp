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

#ifndef MTRVP__TRAINING__ADAM_HPP_
#define MTRVP__TRAINING__ADAM_HPP_

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mtrvp/model/params.hpp"

namespace mtrvp::training
{

struct AdamConfig
{
  double lr{1e-3};
  double beta1{0.9};
  double beta2{0.999};
  double eps{1e-8};
  // Global gradient-norm clip; 0 disables.
  double grad_clip{0.0};
};

/// First/second moment buffers, one per parameter in registration order.
struct AdamState
{
  std::size_t step{0};
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/**
 * @brief One bias-corrected Adam update over every parameter.
 *
 * Parameters that received no gradient are treated as having a zero gradient
 * (their moments still decay). Names in `frozen` are left untouched.
 */
inline void adam_step(
  model::ParameterSet & params, AdamState & state, const AdamConfig & cfg,
  const std::set<std::string> & frozen = {})
{
  const auto & items = params.items();
  if (state.m.empty()) {
    for (const auto & [name, t] : items) {
      state.m.emplace_back(t.numel(), 0.0);
      state.v.emplace_back(t.numel(), 0.0);
    }
  }
  if (state.m.size() != items.size()) {
    throw ShapeError("adam: optimizer state does not match the parameter set");
  }
  double clip = 1.0;
  if (cfg.grad_clip > 0.0) {
    double sq = 0.0;
    for (const auto & [name, t] : items) {
      for (double g : t.grad()) {
        sq += g * g;
      }
    }
    const double gnorm = std::sqrt(sq);
    if (gnorm > cfg.grad_clip) {
      clip = cfg.grad_clip / gnorm;
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < items.size(); ++p) {
    const auto & [name, t0] = items[p];
    auto t = t0;
    auto & m = state.m[p];
    auto & v = state.v[p];
    if (m.size() != t.numel()) {
      throw ShapeError("adam: moment buffer for '" + name + "' has the wrong size");
    }
    if (frozen.count(name)) {
      continue;
    }
    const auto grad = std::as_const(t).grad();
    const bool has_grad = !grad.empty();
    auto value = t.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = has_grad ? grad[i] * clip : 0.0;
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      value[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace mtrvp::training

#endif  // MTRVP__TRAINING__ADAM_HPP_
