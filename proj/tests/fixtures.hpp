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

// Small hand-built scenarios shared by the unit tests.

#ifndef MTRVP_TESTS__FIXTURES_HPP_
#define MTRVP_TESTS__FIXTURES_HPP_

#include <string>
#include <vector>

#include "mtrvp/core/types.hpp"
#include "mtrvp/diffmath/random.hpp"

namespace fixture
{

using namespace mtrvp;

/// Constant-velocity track along +x: waypoint i at ((i + 1) * v * dt, 0).
inline Trajectory straight(double v, std::size_t n = kFutureSteps)
{
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) {
    t.waypoints.push_back({static_cast<double>(i + 1) * v * kStepSeconds, 0.0});
  }
  return t;
}

inline Trajectory offset(const Trajectory & t, Vec2 d)
{
  Trajectory out = t;
  for (auto & w : out.waypoints) w = w + d;
  return out;
}

inline Trajectory random_trajectory(Rng & rng, double spread = 5.0)
{
  Trajectory t;
  Vec2 p{};
  for (std::size_t i = 0; i < kFutureSteps; ++i) {
    p = p + Vec2{rng.uniform(0.0, spread), rng.uniform(-0.5, 0.5) * spread};
    t.waypoints.push_back(p);
  }
  return t;
}

inline Scenario scenario(const std::string & id = "s0", std::size_t d_vis = 8, double v = 5.0)
{
  Scenario s;
  s.id = id;
  for (std::size_t i = 0; i < kHistorySteps; ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(kHistorySteps - 1)) * v * kStepSeconds;
    s.history.steps.push_back({x, 0.0, v, 0.0, 0.0, 0.0});
  }
  s.intent = Intent::Straight;
  s.visual.embedding.assign(d_vis, 0.25);
  s.driven_future = straight(v);
  s.raters.push_back({s.driven_future, 10.0, v});
  s.category = "straight_cruise";
  return s;
}

/// Random but valid scenario with visual width d_vis and optional aux widths.
inline Scenario random_scenario(Rng & rng, const std::string & id, std::size_t d_vis, std::size_t aux_a = 0, std::size_t aux_b = 0)
{
  Scenario s = scenario(id, d_vis, rng.uniform(2.0, 12.0));
  for (auto & e : s.history.steps) {
    for (std::size_t c = 0; c < kStateDim; ++c) e[c] += rng.uniform(-0.5, 0.5);
  }
  for (auto & x : s.visual.embedding) x = rng.uniform(-1.0, 1.0);
  if (aux_a) {
    s.visual.aux_a = std::vector<double>(aux_a);
    for (auto & x : *s.visual.aux_a) x = rng.uniform(-1.0, 1.0);
  }
  if (aux_b) {
    s.visual.aux_b = std::vector<double>(aux_b);
    for (auto & x : *s.visual.aux_b) x = rng.uniform(-1.0, 1.0);
  }
  s.intent = static_cast<Intent>(1 + rng.below(3));
  s.driven_future = random_trajectory(rng, 2.0);
  s.raters[0].trajectory = s.driven_future;
  return s;
}

}  // namespace fixture

#endif  // MTRVP_TESTS__FIXTURES_HPP_
