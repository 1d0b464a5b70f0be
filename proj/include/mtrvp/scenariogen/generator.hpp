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

// Synthetic driving scenarios.
//
// Each sample simulates 12 s of past motion and 5 s of future with a
// unicycle model at 4 Hz, moves everything into the ego frame at prediction
// time, and derives velocities and accelerations as forward differences of
// the stored positions. The maneuver only starts to act on the transition
// from the second to the third future waypoint, so the last history
// acceleration (which reads the first two future waypoints) does not reveal it.

#ifndef MTRVP__SCENARIOGEN__GENERATOR_HPP_
#define MTRVP__SCENARIOGEN__GENERATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mtrvp/core/types.hpp"
#include "mtrvp/core/validate.hpp"
#include "mtrvp/diffmath/random.hpp"
#include "mtrvp/scenariogen/frame.hpp"

namespace mtrvp::scenariogen
{

inline constexpr std::size_t kSimHistorySteps = 48;  // 12 s
inline constexpr std::size_t kSimSteps = kSimHistorySteps + kFutureSteps;
// First transition index driven by the future maneuver.
inline constexpr std::size_t kManeuverStart = kSimHistorySteps + 1;
inline constexpr double kStraightThresholdRad = 15.0 * std::numbers::pi / 180.0;

/// Standard: six driving categories, intent derived from geometry.
/// Multimodal: per intent, the future randomly keeps speed or brakes to a stop.
/// VisionRequired: intent is random; only the visual feature tells the maneuver.
enum class GenMode { Standard, Multimodal, VisionRequired };

inline const char * to_string(GenMode m)
{
  switch (m) {
    case GenMode::Standard: return "standard";
    case GenMode::Multimodal: return "multimodal";
    default: return "vision_required";
  }
}

inline GenMode gen_mode_from_string(const std::string & s)
{
  if (s == "standard") return GenMode::Standard;
  if (s == "multimodal") return GenMode::Multimodal;
  if (s == "vision_required") return GenMode::VisionRequired;
  throw std::invalid_argument("unknown generator mode '" + s + "'");
}

inline const std::vector<std::string> & standard_categories()
{
  static const std::vector<std::string> cats{"straight_cruise", "left_turn", "right_turn",
                                             "stop",            "cut_in",    "debris_swerve"};
  return cats;
}

struct GenConfig
{
  std::size_t n{1000};
  std::uint64_t seed{0};
  GenMode mode{GenMode::Standard};
  // Empty means the mode's default categories with equal weight.
  std::map<std::string, double> category_mix;
  double noise_pos{0.02};
  double noise_vel{0.05};
  std::pair<double, double> speed_range{3.0, 15.0};
  std::size_t d_vis{64};
  std::size_t aux_a_dim{32};
  std::size_t aux_b_dim{48};
  double visual_noise{0.3};
  // Multimodal mode: probability of the keep-speed branch.
  double major_branch_prob{0.7};

  std::map<std::string, double> effective_mix() const
  {
    if (!category_mix.empty()) {
      return category_mix;
    }
    std::map<std::string, double> mix;
    switch (mode) {
      case GenMode::Standard:
        for (const auto & c : standard_categories()) mix[c] = 1.0;
        break;
      case GenMode::Multimodal:
        for (const char * c : {"mm_straight", "mm_left", "mm_right"}) mix[c] = 1.0;
        break;
      case GenMode::VisionRequired:
        for (const char * c : {"straight_cruise", "left_turn", "right_turn", "stop"}) mix[c] = 1.0;
        break;
    }
    return mix;
  }

  void validate() const
  {
    double total = 0.0;
    for (const auto & [k, w] : effective_mix()) {
      if (!(w >= 0.0)) {
        throw InvariantError("category weight for '" + k + "' is negative");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw InvariantError("category weights must sum to a positive value");
    }
    if (!(speed_range.first > 0.0 && speed_range.second >= speed_range.first)) {
      throw InvariantError("speed_range must satisfy 0 < min <= max");
    }
    if (d_vis == 0) {
      throw InvariantError("d_vis must be positive");
    }
    if (noise_pos < 0.0 || noise_vel < 0.0 || visual_noise < 0.0) {
      throw InvariantError("noise levels must be nonnegative");
    }
    if (!(major_branch_prob >= 0.0 && major_branch_prob <= 1.0)) {
      throw InvariantError("major_branch_prob must lie in [0, 1]");
    }
  }
};

/// Per-transition speed (m/s) and yaw rate (rad/s) over kSimSteps - 1 transitions.
struct Controls
{
  std::vector<double> speed = std::vector<double>(kSimSteps - 1, 0.0);
  std::vector<double> yaw_rate = std::vector<double>(kSimSteps - 1, 0.0);
};

/// Unicycle integration from the origin heading along +x.
inline std::vector<Vec2> integrate(const Controls & c)
{
  std::vector<Vec2> p(kSimSteps);
  double heading = 0.0;
  for (std::size_t k = 0; k + 1 < kSimSteps; ++k) {
    p[k + 1] = p[k] + (c.speed[k] * kStepSeconds) * Vec2{std::cos(heading), std::sin(heading)};
    heading += c.yaw_rate[k] * kStepSeconds;
  }
  return p;
}

struct KinematicTrack
{
  EgoStateSequence history;
  Trajectory future;
};

/**
 * @brief Builds the ego-frame history and future from kSimSteps world positions.
 *
 * The last history position becomes the origin and the direction to the
 * first future waypoint becomes +x. Velocities and accelerations are forward
 * differences of the transformed positions.
 */
inline KinematicTrack from_positions(const std::vector<Vec2> & world)
{
  if (world.size() != kSimSteps) {
    throw ShapeError("from_positions: expected " + std::to_string(kSimSteps) + " positions");
  }
  const std::size_t now = kSimHistorySteps - 1;
  const Vec2 step = world[now + 1] - world[now];
  const double heading = norm(step) > 1e-9 ? std::atan2(step.y, step.x) : 0.0;
  const Frame2 f = Frame2::at(world[now], heading);
  std::vector<Vec2> p(kSimSteps);
  for (std::size_t i = 0; i < kSimSteps; ++i) {
    p[i] = f.point(world[i]);
  }
  auto vel = [&](std::size_t i) {
    return Vec2{(p[i + 1].x - p[i].x) / kStepSeconds, (p[i + 1].y - p[i].y) / kStepSeconds};
  };
  KinematicTrack track;
  for (std::size_t i = kSimHistorySteps - kHistorySteps; i < kSimHistorySteps; ++i) {
    const Vec2 v = vel(i);
    const Vec2 vn = vel(i + 1);
    track.history.steps.push_back(
      {p[i].x, p[i].y, v.x, v.y, (vn.x - v.x) / kStepSeconds, (vn.y - v.y) / kStepSeconds});
  }
  track.future.waypoints.assign(p.begin() + kSimHistorySteps, p.end());
  return track;
}

/// Net heading change (rad) of the future relative to +x, from its last segment.
inline double net_heading_change(const Trajectory & future)
{
  const std::size_t n = future.size();
  const Vec2 d = n >= 2 ? future[n - 1] - future[n - 2] : Vec2{1.0, 0.0};
  return norm(d) > 1e-9 ? std::atan2(d.y, d.x) : 0.0;
}

inline Intent intent_from_geometry(const Trajectory & future)
{
  const double dh = net_heading_change(future);
  if (std::abs(dh) < kStraightThresholdRad) {
    return Intent::Straight;
  }
  return dh > 0.0 ? Intent::Left : Intent::Right;
}

namespace detail
{

inline std::uint64_t name_key(const std::string & s)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h = (h ^ c) * 1099511628211ULL;
  }
  return h;
}

// Fixed, seed-independent signature of a category in a given embedding space.
inline std::vector<double> signature(const std::string & category, std::uint64_t space, std::size_t dim)
{
  Rng rng(0x5349474e41545552ULL ^ space, name_key(category));
  std::vector<double> v(dim);
  for (auto & x : v) {
    x = rng.normal();
  }
  return v;
}

inline std::vector<double> noisy_signature(
  const std::string & category, std::uint64_t space, std::size_t dim, double noise, Rng & rng)
{
  auto v = signature(category, space, dim);
  for (auto & x : v) {
    x += noise * rng.normal();
  }
  return v;
}

struct PastMotion
{
  double v_now;
  double accel;
  double yaw_rate;
};

inline void fill_past(Controls & c, const PastMotion & m, double noise_vel, Rng & rng)
{
  double jitter = 0.0;
  for (std::size_t k = 0; k < kManeuverStart; ++k) {
    jitter = 0.9 * jitter + noise_vel * rng.normal();
    const double t = (static_cast<double>(k) - static_cast<double>(kSimHistorySteps - 1)) * kStepSeconds;
    c.speed[k] = std::max(0.5, m.v_now + m.accel * t + jitter);
    c.yaw_rate[k] = m.yaw_rate;
  }
}

// Seconds since prediction time at the start of transition k.
inline double tau(std::size_t k)
{
  return (static_cast<double>(k) - static_cast<double>(kSimHistorySteps - 1)) * kStepSeconds;
}

inline double speed_at_now(const Controls & c) { return c.speed[kSimHistorySteps - 1]; }

inline void maneuver_cruise(Controls & c, double accel)
{
  const double v0 = speed_at_now(c);
  for (std::size_t k = kManeuverStart; k + 1 < kSimSteps; ++k) {
    c.speed[k] = std::max(0.5, v0 + accel * tau(k));
    c.yaw_rate[k] = 0.0;
  }
}

// Constant yaw rate turning through `angle` (signed) over the horizon.
inline void maneuver_turn(Controls & c, double angle, double turn_speed)
{
  const double v0 = speed_at_now(c);
  const double span = static_cast<double>(kSimSteps - 1 - kManeuverStart) * kStepSeconds;
  for (std::size_t k = kManeuverStart; k + 1 < kSimSteps; ++k) {
    c.speed[k] = std::max(turn_speed, v0 - 2.0 * tau(k));
    c.yaw_rate[k] = angle / span;
  }
}

inline void maneuver_stop(Controls & c, double decel)
{
  const double v0 = speed_at_now(c);
  for (std::size_t k = kManeuverStart; k + 1 < kSimSteps; ++k) {
    c.speed[k] = std::max(0.0, v0 - decel * tau(k));
    c.yaw_rate[k] = 0.0;
  }
}

inline void maneuver_cut_in(Controls & c, double decel, double floor_ratio)
{
  const double v0 = speed_at_now(c);
  for (std::size_t k = kManeuverStart; k + 1 < kSimSteps; ++k) {
    c.speed[k] = std::max(floor_ratio * v0, v0 - decel * tau(k));
    c.yaw_rate[k] = 0.0;
  }
}

// Left-right-left yaw pulse; net heading change is zero, lateral offset is not.
inline void maneuver_swerve(Controls & c, double yaw_rate, double sign)
{
  const double v0 = speed_at_now(c);
  for (std::size_t k = kManeuverStart; k + 1 < kSimSteps; ++k) {
    const double t = tau(k);
    double w = 0.0;
    if (t < 1.25) {
      w = yaw_rate;
    } else if (t < 3.75) {
      w = -yaw_rate;
    } else if (t < 5.0) {
      w = yaw_rate;
    }
    c.speed[k] = v0;
    c.yaw_rate[k] = sign * w;
  }
}

inline void apply_maneuver(Controls & c, const std::string & category, Rng & rng)
{
  if (category == "straight_cruise") {
    maneuver_cruise(c, rng.uniform(-0.4, 0.4));
  } else if (category == "left_turn" || category == "right_turn") {
    const double angle = rng.uniform(50.0, 90.0) * std::numbers::pi / 180.0;
    maneuver_turn(c, category == "left_turn" ? angle : -angle, rng.uniform(4.0, 7.0));
  } else if (category == "stop") {
    maneuver_stop(c, rng.uniform(3.0, 5.0));
  } else if (category == "cut_in") {
    maneuver_cut_in(c, rng.uniform(2.0, 3.5), rng.uniform(0.4, 0.6));
  } else if (category == "debris_swerve") {
    maneuver_swerve(c, rng.uniform(0.08, 0.16), rng.uniform() < 0.5 ? 1.0 : -1.0);
  } else {
    throw InvariantError("unknown category '" + category + "'");
  }
}

// Lateral offset growing linearly along the horizon.
inline Trajectory perturb(const Trajectory & t, double offset)
{
  Trajectory out = t;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = static_cast<double>(i + 1) / n;
    out[i].y += offset * s;
  }
  return out;
}

inline std::string pick_category(const std::map<std::string, double> & mix, Rng & rng)
{
  double total = 0.0;
  for (const auto & [k, w] : mix) total += w;
  double u = rng.uniform() * total;
  std::string last;
  for (const auto & [k, w] : mix) {
    if (w <= 0.0) continue;
    last = k;
    if (u < w) return k;
    u -= w;
  }
  return last;
}

}  // namespace detail

/// Deterministic visual feature of a category (signature plus noise drawn from rng).
inline VisualFeature make_visual(const std::string & category, const GenConfig & cfg, Rng & rng)
{
  VisualFeature v;
  v.embedding = detail::noisy_signature(category, 1, cfg.d_vis, cfg.visual_noise, rng);
  if (cfg.aux_a_dim) {
    v.aux_a = detail::noisy_signature(category, 2, cfg.aux_a_dim, cfg.visual_noise, rng);
  }
  if (cfg.aux_b_dim) {
    v.aux_b = detail::noisy_signature(category, 3, cfg.aux_b_dim, cfg.visual_noise, rng);
  }
  return v;
}

/// One scenario; `rng` should be the per-index stream.
inline Scenario generate_one(const GenConfig & cfg, std::size_t index, Rng rng)
{
  const auto mix = cfg.effective_mix();
  const std::string category = detail::pick_category(mix, rng);

  detail::PastMotion past{
    rng.uniform(cfg.speed_range.first, cfg.speed_range.second), rng.uniform(-0.3, 0.3),
    rng.uniform(-0.02, 0.02)};
  Controls base;
  detail::fill_past(base, past, cfg.noise_vel, rng);

  Controls driven = base;
  Intent intent = Intent::Straight;
  bool geometric_intent = true;
  if (cfg.mode == GenMode::Multimodal) {
    // mm_<intent>: turn geometry fixed by the intent; the speed profile is one
    // of two branches that the past does not reveal.
    const double angle = 70.0 * std::numbers::pi / 180.0;
    const bool major = rng.uniform() < cfg.major_branch_prob;
    if (category == "mm_left" || category == "mm_right") {
      const double signed_angle = category == "mm_left" ? angle : -angle;
      if (major) {
        const double v0 = detail::speed_at_now(driven);
        const double span = static_cast<double>(kSimSteps - 1 - kManeuverStart) * kStepSeconds;
        for (std::size_t k = kManeuverStart; k + 1 < kSimSteps; ++k) {
          driven.speed[k] = v0;
          driven.yaw_rate[k] = signed_angle / span;
        }
      } else {
        detail::maneuver_turn(driven, signed_angle, 0.0);
        detail::maneuver_stop(driven, 4.0);
        const double span = static_cast<double>(kSimSteps - 1 - kManeuverStart) * kStepSeconds;
        for (std::size_t k = kManeuverStart; k + 1 < kSimSteps; ++k) {
          driven.yaw_rate[k] = signed_angle / span;
        }
      }
    } else if (category == "mm_straight") {
      if (major) {
        detail::maneuver_cruise(driven, 0.0);
      } else {
        detail::maneuver_stop(driven, 4.0);
      }
    } else {
      throw InvariantError("unknown multimodal category '" + category + "'");
    }
  } else {
    detail::apply_maneuver(driven, category, rng);
    geometric_intent = cfg.mode == GenMode::Standard;
  }

  std::vector<Vec2> world = integrate(driven);
  for (std::size_t i = 0; i < kSimHistorySteps; ++i) {
    world[i].x += cfg.noise_pos * rng.normal();
    world[i].y += cfg.noise_pos * rng.normal();
  }
  const KinematicTrack track = from_positions(world);

  if (cfg.mode == GenMode::Multimodal) {
    intent = category == "mm_left" ? Intent::Left : category == "mm_right" ? Intent::Right : Intent::Straight;
  } else if (geometric_intent) {
    intent = intent_from_geometry(track.future);
  } else {
    intent = static_cast<Intent>(1 + rng.below(3));
  }

  Scenario s;
  char id[64];
  std::snprintf(id, sizeof(id), "%s-%06zu", to_string(cfg.mode), index);
  s.id = id;
  s.history = track.history;
  s.intent = intent;
  s.visual = make_visual(category, cfg, rng);
  s.driven_future = track.future;
  s.category = category;

  const auto & last = s.history.steps.back();
  const double v_now = std::hypot(last.vx, last.vy);
  const double offset = rng.uniform(0.3, 1.5) * (rng.uniform() < 0.5 ? 1.0 : -1.0);
  const double mild_score = 9.0 - 3.0 * (std::abs(offset) - 0.3) / 1.2;

  // Wrong-intent alternative built from the same past.
  Controls wrong = base;
  const Intent true_geo = intent_from_geometry(track.future);
  if (true_geo == Intent::Straight) {
    detail::maneuver_turn(wrong, (rng.uniform() < 0.5 ? 1.0 : -1.0) * 70.0 * std::numbers::pi / 180.0, 5.0);
  } else {
    detail::maneuver_cruise(wrong, 0.0);
  }
  std::vector<Vec2> wrong_world = integrate(wrong);
  for (std::size_t i = 0; i < kSimHistorySteps; ++i) {
    wrong_world[i] = world[i];
  }
  // Shares the observed past, so both live in the same ego frame.
  const Frame2 f = Frame2::at(
    world[kSimHistorySteps - 1],
    std::atan2(world[kSimHistorySteps].y - world[kSimHistorySteps - 1].y,
               world[kSimHistorySteps].x - world[kSimHistorySteps - 1].x));
  Trajectory wrong_future;
  for (std::size_t i = kSimHistorySteps; i < kSimSteps; ++i) {
    wrong_future.waypoints.push_back(f.point(wrong_world[i]));
  }

  s.raters.push_back({s.driven_future, 10.0, v_now});
  s.raters.push_back({detail::perturb(s.driven_future, offset), mild_score, v_now});
  s.raters.push_back({wrong_future, rng.uniform(0.0, 5.0), v_now});
  return s;
}

/**
 * @brief Generates cfg.n scenarios. Sample i depends only on (seed, i).
 */
inline std::vector<Scenario> generate(const GenConfig & cfg)
{
  cfg.validate();
  const Rng root(cfg.seed, 0x67656e);
  std::vector<Scenario> out;
  out.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    out.push_back(generate_one(cfg, i, root.split(i)));
    require_valid(out.back());
  }
  return out;
}

}  // namespace mtrvp::scenariogen

#endif  // MTRVP__SCENARIOGEN__GENERATOR_HPP_
