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

// Rater Feedback Score.
//
// A prediction is compared with each rater trajectory at T = 3 s and 5 s.
// Inside a rater's speed-scaled trust region it receives that rater's score;
// outside every region it receives max(4, x * 0.1^clamp(delta - 0.5, 0, 1))
// where x and delta belong to the closest rater.

#ifndef MTRVP__METRICS__RFS_HPP_
#define MTRVP__METRICS__RFS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtrvp/core/types.hpp"

namespace mtrvp::metrics
{

inline constexpr double kFloorScore = 4.0;

struct TrustThresholds
{
  int t;
  double eta_lat_base;
  double eta_long_base;
};

/// Base trust-region half-widths at 3 s and 5 s.
inline TrustThresholds base_thresholds(int t)
{
  switch (t) {
    case 3: return {3, 1.0, 4.0};
    case 5: return {5, 1.8, 7.2};
    default: throw std::invalid_argument("trust thresholds defined for T = 3 or 5, got " + std::to_string(t));
  }
}

/// Piecewise-linear threshold scale in the rater's initial speed (m/s).
inline double speed_scale(double v)
{
  if (!(v >= 0.0)) {
    throw std::invalid_argument("speed_scale: negative or NaN speed");
  }
  if (v < 1.4) {
    return 0.5;
  }
  if (v < 11.0) {
    return 0.5 + 0.5 * (v - 1.4) / (11.0 - 1.4);
  }
  return 1.0;
}

struct ScaledThresholds
{
  double eta_lat;
  double eta_long;
};

inline ScaledThresholds scaled_thresholds(int t, double v)
{
  const auto base = base_thresholds(t);
  const double s = speed_scale(v);
  return {s * base.eta_lat_base, s * base.eta_long_base};
}

/// Waypoint index evaluated for horizon T seconds.
inline std::size_t horizon_index(int t)
{
  if (t < 1) {
    throw std::invalid_argument("horizon must be at least 1 s");
  }
  return static_cast<std::size_t>(std::lround(t / kStepSeconds)) - 1;
}

/// Unit tangent of `traj` at index i from central differences (one-sided at
/// the ends). Falls back to +x when the trajectory does not move there.
inline Vec2 heading_at(const Trajectory & traj, std::size_t i)
{
  const std::size_t n = traj.size();
  Vec2 d{};
  if (n >= 2) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 < n ? i + 1 : n - 1;
    d = traj[hi] - traj[lo];
  }
  const double len = norm(d);
  if (!(len > 1e-9)) {
    return {1.0, 0.0};
  }
  return {d.x / len, d.y / len};
}

struct LatLongError
{
  double lat;
  double lon;
  double delta;
};

/**
 * @brief Decomposes pred(T) - rater(T) along the rater heading at T.
 *
 * lon is the component along the heading, lat along its left normal, and
 * delta the Euclidean norm of the displacement.
 */
inline LatLongError lat_long_error(const Trajectory & pred, const Trajectory & rater, int t)
{
  const std::size_t i = horizon_index(t);
  if (pred.size() <= i || rater.size() <= i) {
    throw std::invalid_argument("trajectory too short for horizon " + std::to_string(t) + " s");
  }
  const Vec2 h = heading_at(rater, i);
  const Vec2 n{-h.y, h.x};
  const Vec2 d = pred[i] - rater[i];
  return {dot(d, n), dot(d, h), norm(d)};
}

/// Out-of-region score: x_hat * 0.1^clamp(delta - 0.5, 0, 1), floored.
inline double falloff_score(double x_hat, double delta)
{
  const double exponent = std::min(std::max(delta - 0.5, 0.0), 1.0);
  return std::max(kFloorScore, x_hat * std::pow(0.1, exponent));
}

/// Score of a single trajectory against the rater set at horizon T.
inline double rfs_single(const Trajectory & pred, const std::vector<RaterTrajectory> & raters, int t)
{
  if (raters.empty()) {
    throw std::invalid_argument("rfs: empty rater list");
  }
  double best_in_region = -1.0;
  std::size_t closest = 0;
  double closest_delta = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < raters.size(); ++r) {
    const auto & rater = raters[r];
    const auto e = lat_long_error(pred, rater.trajectory, t);
    const auto th = scaled_thresholds(t, rater.initial_speed);
    if (std::abs(e.lat) <= th.eta_lat && std::abs(e.lon) <= th.eta_long) {
      best_in_region = std::max(best_in_region, rater.score);
    }
    if (e.delta < closest_delta ||
        (e.delta == closest_delta && rater.score > raters[closest].score)) {
      closest_delta = e.delta;
      closest = r;
    }
  }
  if (best_in_region >= 0.0) {
    return best_in_region;
  }
  return falloff_score(raters[closest].score, closest_delta);
}

struct RfsReport
{
  double overall{0.0};
  double rfs_3s{0.0};
  double rfs_5s{0.0};
  std::map<std::string, double> per_category;
  std::size_t n_samples{0};
};

/// Per-sample score is the mean of the 3 s and 5 s scores of the given
/// trajectory; aggregates sum in sample order.
inline RfsReport rfs_aggregate(
  const std::vector<Trajectory> & chosen, const std::vector<Scenario> & scenarios)
{
  if (chosen.size() != scenarios.size()) {
    throw std::invalid_argument("rfs: prediction count does not match scenario count");
  }
  RfsReport rep;
  std::map<std::string, std::pair<double, std::size_t>> cats;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const double s3 = rfs_single(chosen[i], scenarios[i].raters, 3);
    const double s5 = rfs_single(chosen[i], scenarios[i].raters, 5);
    const double s = 0.5 * (s3 + s5);
    rep.overall += s;
    rep.rfs_3s += s3;
    rep.rfs_5s += s5;
    auto & c = cats[scenarios[i].category];
    c.first += s;
    c.second += 1;
  }
  rep.n_samples = chosen.size();
  if (rep.n_samples) {
    const double n = static_cast<double>(rep.n_samples);
    rep.overall /= n;
    rep.rfs_3s /= n;
    rep.rfs_5s /= n;
  }
  for (const auto & [name, acc] : cats) {
    rep.per_category[name] = acc.first / static_cast<double>(acc.second);
  }
  return rep;
}

/// Scores the most probable mode of each prediction set.
inline RfsReport rfs_batch(const std::vector<PredictionSet> & preds, const std::vector<Scenario> & scenarios)
{
  if (preds.size() != scenarios.size()) {
    throw std::invalid_argument("rfs: prediction count does not match scenario count");
  }
  std::vector<Trajectory> top1;
  top1.reserve(preds.size());
  for (const auto & p : preds) {
    check_prediction_set(p);
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      if (p.probs[k] > p.probs[best]) {
        best = k;
      }
    }
    top1.push_back(p.modes[best]);
  }
  return rfs_aggregate(top1, scenarios);
}

}  // namespace mtrvp::metrics

#endif  // MTRVP__METRICS__RFS_HPP_
