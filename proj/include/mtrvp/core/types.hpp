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

#ifndef MTRVP__CORE__TYPES_HPP_
#define MTRVP__CORE__TYPES_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtrvp
{

// Sampling and horizon constants of the planning problem.
inline constexpr double kStepSeconds = 0.25;
inline constexpr std::size_t kHistorySteps = 16;  // 4 s at 4 Hz
inline constexpr std::size_t kFutureSteps = 20;   // 5 s at 4 Hz
inline constexpr std::size_t kStateDim = 6;       // x, y, vx, vy, ax, ay
inline constexpr std::size_t kNumIntents = 3;

// Default widths of the auxiliary scene embeddings (language-image and
// self-supervised vision backbones).
inline constexpr std::size_t kDefaultAuxADim = 512;
inline constexpr std::size_t kDefaultAuxBDim = 768;
inline constexpr std::size_t kReferenceVisualDim = 768;

/// Raised when an input does not match the expected tensor or vector shape.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a domain value violates a type invariant.
class InvariantError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Vec2 &, const Vec2 &) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/**
 * @brief One kinematic sample of the ego vehicle in the BEV frame.
 */
struct EgoState
{
  double x{0.0};
  double y{0.0};
  double vx{0.0};
  double vy{0.0};
  double ax{0.0};
  double ay{0.0};

  double operator[](std::size_t i) const
  {
    switch (i) {
      case 0: return x;
      case 1: return y;
      case 2: return vx;
      case 3: return vy;
      case 4: return ax;
      default: return ay;
    }
  }

  double & operator[](std::size_t i)
  {
    switch (i) {
      case 0: return x;
      case 1: return y;
      case 2: return vx;
      case 3: return vy;
      case 4: return ax;
      default: return ay;
    }
  }

  bool finite() const
  {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(vx) && std::isfinite(vy) &&
           std::isfinite(ax) && std::isfinite(ay);
  }

  friend bool operator==(const EgoState &, const EgoState &) = default;
};

/**
 * @brief Past kinematic record fed to the encoder. The last step is the pose
 * at prediction time.
 */
struct EgoStateSequence
{
  std::vector<EgoState> steps;

  friend bool operator==(const EgoStateSequence &, const EgoStateSequence &) = default;
};

/**
 * @brief BEV waypoint sequence sampled every kStepSeconds, starting one step
 * after prediction time.
 */
struct Trajectory
{
  std::vector<Vec2> waypoints;
  double dt{kStepSeconds};

  std::size_t size() const { return waypoints.size(); }
  const Vec2 & operator[](std::size_t i) const { return waypoints[i]; }
  Vec2 & operator[](std::size_t i) { return waypoints[i]; }

  friend bool operator==(const Trajectory &, const Trajectory &) = default;
};

enum class Intent : int { Straight = 1, Left = 2, Right = 3 };

inline bool is_valid_intent(int value) { return value >= 1 && value <= 3; }

inline Intent intent_from_int(int value)
{
  if (!is_valid_intent(value)) {
    throw InvariantError("intent value " + std::to_string(value) + " not in {1, 2, 3}");
  }
  return static_cast<Intent>(value);
}

inline int to_int(Intent i) { return static_cast<int>(i); }

inline std::size_t intent_index(Intent i) { return static_cast<std::size_t>(to_int(i) - 1); }

inline const char * intent_name(Intent i)
{
  switch (i) {
    case Intent::Straight: return "straight";
    case Intent::Left: return "left";
    default: return "right";
  }
}

/**
 * @brief Precomputed visual embedding plus optional auxiliary scene embeddings.
 *
 * A blank feature is the all-zeros embedding of the same width.
 */
struct VisualFeature
{
  std::vector<double> embedding;
  std::optional<std::vector<double>> aux_a;
  std::optional<std::vector<double>> aux_b;

  static VisualFeature blank(std::size_t d_vis) { return VisualFeature{std::vector<double>(d_vis, 0.0), {}, {}}; }

  friend bool operator==(const VisualFeature &, const VisualFeature &) = default;
};

struct RaterTrajectory
{
  Trajectory trajectory;
  double score{0.0};
  double initial_speed{0.0};

  friend bool operator==(const RaterTrajectory &, const RaterTrajectory &) = default;
};

struct Scenario
{
  std::string id;
  EgoStateSequence history;
  Intent intent{Intent::Straight};
  VisualFeature visual;
  Trajectory driven_future;
  std::vector<RaterTrajectory> raters;
  std::string category;

  friend bool operator==(const Scenario &, const Scenario &) = default;
};

/**
 * @brief K candidate trajectories with a distribution over them.
 */
struct PredictionSet
{
  std::vector<Trajectory> modes;
  std::vector<double> probs;

  std::size_t size() const { return modes.size(); }
};

/// Throws InvariantError unless probs is a valid distribution matching modes.
inline void check_prediction_set(const PredictionSet & p, double tol = 1e-6)
{
  if (p.modes.empty()) {
    throw InvariantError("prediction set has no modes");
  }
  if (p.modes.size() != p.probs.size()) {
    throw InvariantError(
      "prediction set has " + std::to_string(p.modes.size()) + " modes but " +
      std::to_string(p.probs.size()) + " probabilities");
  }
  double total = 0.0;
  for (double q : p.probs) {
    if (!(q >= 0.0)) {
      throw InvariantError("negative or non-finite mode probability");
    }
    total += q;
  }
  if (std::abs(total - 1.0) > tol) {
    throw InvariantError("mode probabilities sum to " + std::to_string(total));
  }
}

}  // namespace mtrvp

#endif  // MTRVP__CORE__TYPES_HPP_
