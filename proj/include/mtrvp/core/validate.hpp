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

#ifndef MTRVP__CORE__VALIDATE_HPP_
#define MTRVP__CORE__VALIDATE_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mtrvp/core/types.hpp"

namespace mtrvp
{

namespace detail
{

inline bool all_finite(const std::vector<double> & v)
{
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline void check_trajectory(
  const Trajectory & t, const std::string & what, std::vector<std::string> & out)
{
  if (t.size() != kFutureSteps) {
    out.push_back(what + " length " + std::to_string(t.size()) + " != " + std::to_string(kFutureSteps));
  }
  for (const auto & w : t.waypoints) {
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
      out.push_back(what + " has non-finite waypoint");
      break;
    }
  }
}

}  // namespace detail

/**
 * @brief Lists every violated scenario invariant; empty iff the scenario is valid.
 *
 * When expected_visual_dim is set the visual embedding width is checked as well.
 */
inline std::vector<std::string> validate_scenario(
  const Scenario & s, std::optional<std::size_t> expected_visual_dim = std::nullopt)
{
  std::vector<std::string> out;
  if (s.id.empty()) {
    out.emplace_back("empty id");
  }
  if (s.history.steps.size() != kHistorySteps) {
    out.push_back(
      "history length " + std::to_string(s.history.steps.size()) + " != " +
      std::to_string(kHistorySteps));
  }
  if (!std::all_of(s.history.steps.begin(), s.history.steps.end(), [](const EgoState & e) {
        return e.finite();
      })) {
    out.emplace_back("history has non-finite component");
  }
  if (!is_valid_intent(to_int(s.intent))) {
    out.push_back("intent " + std::to_string(to_int(s.intent)) + " not in {1, 2, 3}");
  }
  if (s.visual.embedding.empty()) {
    out.emplace_back("visual embedding is empty");
  } else if (expected_visual_dim && s.visual.embedding.size() != *expected_visual_dim) {
    out.push_back(
      "visual length " + std::to_string(s.visual.embedding.size()) + " != " +
      std::to_string(*expected_visual_dim));
  }
  if (!detail::all_finite(s.visual.embedding) ||
      (s.visual.aux_a && !detail::all_finite(*s.visual.aux_a)) ||
      (s.visual.aux_b && !detail::all_finite(*s.visual.aux_b))) {
    out.emplace_back("visual feature has non-finite component");
  }
  detail::check_trajectory(s.driven_future, "future", out);
  if (s.raters.empty() || s.raters.size() > 3) {
    out.push_back("rater count " + std::to_string(s.raters.size()) + " not in [1, 3]");
  }
  bool any_above_six = false;
  for (std::size_t i = 0; i < s.raters.size(); ++i) {
    const auto & r = s.raters[i];
    const std::string tag = "rater " + std::to_string(i);
    detail::check_trajectory(r.trajectory, tag + " trajectory", out);
    if (!(r.score >= 0.0 && r.score <= 10.0)) {
      out.push_back(tag + " score " + std::to_string(r.score) + " not in [0, 10]");
    }
    if (!(r.initial_speed >= 0.0) || !std::isfinite(r.initial_speed)) {
      out.push_back(tag + " initial_speed " + std::to_string(r.initial_speed) + " < 0");
    }
    any_above_six = any_above_six || r.score > 6.0;
  }
  if (!any_above_six) {
    out.emplace_back("no rater score > 6");
  }
  if (s.category.empty()) {
    out.emplace_back("empty category");
  }
  return out;
}

/// Throws InvariantError listing every violation.
inline void require_valid(const Scenario & s, std::optional<std::size_t> expected_visual_dim = std::nullopt)
{
  const auto violations = validate_scenario(s, expected_visual_dim);
  if (!violations.empty()) {
    std::string msg = "scenario '" + s.id + "' invalid:";
    for (const auto & v : violations) {
      msg += " [" + v + "]";
    }
    throw InvariantError(msg);
  }
}

}  // namespace mtrvp

#endif  // MTRVP__CORE__VALIDATE_HPP_
