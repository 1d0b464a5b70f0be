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

// Newline-delimited JSON scenario records. One scenario per line with the
// fields: id, history (16x6), intent, visual, aux_a?, aux_b?, future (20x2),
// raters [{waypoints, score, initial_speed}], category.
//
// Doubles are written in shortest round-trip form, so a write/read cycle is
// bit-exact for finite values.

#ifndef MTRVP__CORE__SCENARIO_IO_HPP_
#define MTRVP__CORE__SCENARIO_IO_HPP_

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtrvp/core/types.hpp"
#include "mtrvp/core/validate.hpp"

namespace mtrvp
{

/// Malformed or invalid scenario record. field() names the offending key when known.
class ParseError : public std::runtime_error
{
public:
  ParseError(std::string field, const std::string & what)
  : std::runtime_error(what), field_(std::move(field))
  {
  }

  const std::string & field() const { return field_; }

private:
  std::string field_;
};

namespace detail
{

using nlohmann::json;

inline json waypoints_to_json(const Trajectory & t)
{
  json arr = json::array();
  for (const auto & w : t.waypoints) {
    arr.push_back(json::array({w.x, w.y}));
  }
  return arr;
}

inline const json & require_field(const json & obj, const std::string & key, const std::string & context)
{
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(key, context + "missing field '" + key + "'");
  }
  return *it;
}

inline double as_number(const json & v, const std::string & field)
{
  if (!v.is_number()) {
    throw ParseError(field, "field '" + field + "' expects a number");
  }
  return v.get<double>();
}

inline std::vector<double> as_vector(const json & v, const std::string & field)
{
  if (!v.is_array()) {
    throw ParseError(field, "field '" + field + "' expects an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto & e : v) {
    out.push_back(as_number(e, field));
  }
  return out;
}

inline Trajectory trajectory_from_json(const json & v, const std::string & field)
{
  if (!v.is_array()) {
    throw ParseError(field, "field '" + field + "' expects an array of [x, y]");
  }
  Trajectory t;
  t.waypoints.reserve(v.size());
  for (const auto & row : v) {
    const auto xy = as_vector(row, field);
    if (xy.size() != 2) {
      throw ParseError(field, "field '" + field + "' rows must have 2 entries");
    }
    t.waypoints.push_back({xy[0], xy[1]});
  }
  return t;
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario & s)
{
  using nlohmann::json;
  json j;
  j["id"] = s.id;
  json hist = json::array();
  for (const auto & e : s.history.steps) {
    hist.push_back(json::array({e.x, e.y, e.vx, e.vy, e.ax, e.ay}));
  }
  j["history"] = std::move(hist);
  j["intent"] = to_int(s.intent);
  j["visual"] = s.visual.embedding;
  if (s.visual.aux_a) {
    j["aux_a"] = *s.visual.aux_a;
  }
  if (s.visual.aux_b) {
    j["aux_b"] = *s.visual.aux_b;
  }
  j["future"] = detail::waypoints_to_json(s.driven_future);
  json raters = json::array();
  for (const auto & r : s.raters) {
    raters.push_back(
      {{"waypoints", detail::waypoints_to_json(r.trajectory)},
       {"score", r.score},
       {"initial_speed", r.initial_speed}});
  }
  j["raters"] = std::move(raters);
  j["category"] = s.category;
  return j;
}

/// Parses and validates one record. Throws ParseError naming the bad field.
inline Scenario scenario_from_json(const nlohmann::json & j)
{
  using detail::require_field;
  if (!j.is_object()) {
    throw ParseError("", "scenario record must be an object");
  }
  Scenario s;
  const auto & id = require_field(j, "id", "");
  if (!id.is_string()) {
    throw ParseError("id", "field 'id' expects a string");
  }
  s.id = id.get<std::string>();

  const auto & hist = require_field(j, "history", "");
  if (!hist.is_array()) {
    throw ParseError("history", "field 'history' expects an array");
  }
  for (const auto & row : hist) {
    const auto v = detail::as_vector(row, "history");
    if (v.size() != kStateDim) {
      throw ParseError("history", "field 'history' rows must have 6 entries");
    }
    s.history.steps.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
  }

  const auto & intent = require_field(j, "intent", "");
  if (!intent.is_number_integer() || !is_valid_intent(intent.get<int>())) {
    throw ParseError("intent", "field 'intent' must be 1, 2 or 3");
  }
  s.intent = static_cast<Intent>(intent.get<int>());

  s.visual.embedding = detail::as_vector(require_field(j, "visual", ""), "visual");
  if (auto it = j.find("aux_a"); it != j.end() && !it->is_null()) {
    s.visual.aux_a = detail::as_vector(*it, "aux_a");
  }
  if (auto it = j.find("aux_b"); it != j.end() && !it->is_null()) {
    s.visual.aux_b = detail::as_vector(*it, "aux_b");
  }
  s.driven_future = detail::trajectory_from_json(require_field(j, "future", ""), "future");

  const auto & raters = require_field(j, "raters", "");
  if (!raters.is_array()) {
    throw ParseError("raters", "field 'raters' expects an array");
  }
  for (const auto & r : raters) {
    RaterTrajectory rt;
    rt.trajectory = detail::trajectory_from_json(require_field(r, "waypoints", "raters: "), "raters.waypoints");
    rt.score = detail::as_number(require_field(r, "score", "raters: "), "raters.score");
    rt.initial_speed =
      detail::as_number(require_field(r, "initial_speed", "raters: "), "raters.initial_speed");
    s.raters.push_back(std::move(rt));
  }
  const auto & category = require_field(j, "category", "");
  if (!category.is_string()) {
    throw ParseError("category", "field 'category' expects a string");
  }
  s.category = category.get<std::string>();

  const auto violations = validate_scenario(s);
  if (!violations.empty()) {
    throw ParseError("", "scenario '" + s.id + "' violates invariant: " + violations.front());
  }
  return s;
}

/// One record line, without the trailing newline.
inline std::string serialize_scenario(const Scenario & s)
{
  require_valid(s);
  return scenario_to_json(s).dump();
}

inline Scenario deserialize_scenario(const std::string & line)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error & e) {
    throw ParseError("", std::string("malformed scenario record: ") + e.what());
  }
  return scenario_from_json(j);
}

inline void write_scenarios(const std::string & path, const std::vector<Scenario> & scenarios)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  for (const auto & s : scenarios) {
    out << serialize_scenario(s) << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing '" + path + "'");
  }
}

/// Reads every non-empty line. Errors carry the 1-based line number.
inline std::vector<Scenario> read_scenarios(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::vector<Scenario> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(deserialize_scenario(line));
    } catch (const ParseError & e) {
      throw ParseError(e.field(), path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mtrvp

#endif  // MTRVP__CORE__SCENARIO_IO_HPP_
