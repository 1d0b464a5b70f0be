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

#ifndef MTRVP__SCENARIOGEN__FRAME_HPP_
#define MTRVP__SCENARIOGEN__FRAME_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "mtrvp/core/scenario_io.hpp"
#include "mtrvp/core/types.hpp"

namespace mtrvp::scenariogen
{

/// Rigid 2-D transform mapping world coordinates into a local frame.
struct Frame2
{
  Vec2 origin{};
  double cos_h{1.0};
  double sin_h{0.0};

  static Frame2 at(Vec2 origin, double heading) { return {origin, std::cos(heading), std::sin(heading)}; }

  Vec2 point(Vec2 p) const { return vector(p - origin); }

  Vec2 vector(Vec2 v) const { return {cos_h * v.x + sin_h * v.y, -sin_h * v.x + cos_h * v.y}; }
};

/**
 * @brief Ego heading at prediction time, taken from the latest history step
 * with non-negligible velocity. Returns 0 when the ego never moved.
 */
inline double ego_heading(const EgoStateSequence & h)
{
  for (auto it = h.steps.rbegin(); it != h.steps.rend(); ++it) {
    if (std::hypot(it->vx, it->vy) > 1e-6) {
      return std::atan2(it->vy, it->vx);
    }
  }
  return 0.0;
}

inline Trajectory transform(const Trajectory & t, const Frame2 & f)
{
  Trajectory out = t;
  for (auto & w : out.waypoints) {
    w = f.point(w);
  }
  return out;
}

/**
 * @brief Re-expresses every trajectory relative to the ego pose at prediction
 * time: last history position at the origin, heading along +x.
 */
inline Scenario to_relative_frame(const Scenario & s)
{
  if (s.history.steps.empty()) {
    throw InvariantError("to_relative_frame: empty history");
  }
  const auto & now = s.history.steps.back();
  const Frame2 f = Frame2::at({now.x, now.y}, ego_heading(s.history));
  Scenario out = s;
  for (auto & e : out.history.steps) {
    const Vec2 p = f.point({e.x, e.y});
    const Vec2 v = f.vector({e.vx, e.vy});
    const Vec2 a = f.vector({e.ax, e.ay});
    e = {p.x, p.y, v.x, v.y, a.x, a.y};
  }
  out.driven_future = transform(s.driven_future, f);
  for (auto & r : out.raters) {
    r.trajectory = transform(r.trajectory, f);
  }
  return out;
}

/**
 * @brief Loads externally extracted records in the scenario schema.
 *
 * Records are validated on read; with `relative` they are also moved into
 * the ego frame.
 */
inline std::vector<Scenario> import_scenarios(const std::string & path, bool relative = true)
{
  auto data = read_scenarios(path);
  if (relative) {
    for (auto & s : data) {
      s = to_relative_frame(s);
    }
  }
  return data;
}

}  // namespace mtrvp::scenariogen

#endif  // MTRVP__SCENARIOGEN__FRAME_HPP_
