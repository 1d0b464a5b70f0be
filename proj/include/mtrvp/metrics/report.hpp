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

#ifndef MTRVP__METRICS__REPORT_HPP_
#define MTRVP__METRICS__REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtrvp/metrics/ade.hpp"
#include "mtrvp/metrics/rfs.hpp"

namespace mtrvp::metrics
{

struct EvalReport
{
  RfsReport rfs;
  double ade1_3s{0.0};
  double ade1_5s{0.0};
  double ade5_3s{0.0};
  double ade5_5s{0.0};
  double ade10_3s{0.0};
  double ade10_5s{0.0};
  std::size_t n{0};
};

/**
 * @brief RFS on the top-1 mode plus top-1/5/10 ADE at 3 s and 5 s.
 *
 * When a model emits fewer than 5 or 10 modes, the top-k columns use all of them.
 */
inline EvalReport evaluate(const std::vector<PredictionSet> & preds, const std::vector<Scenario> & scenarios)
{
  EvalReport r;
  r.rfs = rfs_batch(preds, scenarios);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto & p = preds[i];
    const auto & target = scenarios[i].driven_future;
    const std::size_t k5 = std::min<std::size_t>(5, p.size());
    const std::size_t k10 = std::min<std::size_t>(10, p.size());
    r.ade1_3s += ade_topk(p, target, 1, 3);
    r.ade1_5s += ade_topk(p, target, 1, 5);
    r.ade5_3s += ade_topk(p, target, k5, 3);
    r.ade5_5s += ade_topk(p, target, k5, 5);
    r.ade10_3s += ade_topk(p, target, k10, 3);
    r.ade10_5s += ade_topk(p, target, k10, 5);
  }
  r.n = preds.size();
  if (r.n) {
    const double n = static_cast<double>(r.n);
    for (double * v : {&r.ade1_3s, &r.ade1_5s, &r.ade5_3s, &r.ade5_5s, &r.ade10_3s, &r.ade10_5s}) {
      *v /= n;
    }
  }
  return r;
}

inline nlohmann::json to_json(const EvalReport & r)
{
  nlohmann::json j;
  j["overall_rfs"] = r.rfs.overall;
  j["rfs@3"] = r.rfs.rfs_3s;
  j["rfs@5"] = r.rfs.rfs_5s;
  j["per_category"] = nlohmann::json::object();
  for (const auto & [k, v] : r.rfs.per_category) {
    j["per_category"][k] = v;
  }
  j["ade1@3s"] = r.ade1_3s;
  j["ade1@5s"] = r.ade1_5s;
  j["ade_top5@3s"] = r.ade5_3s;
  j["ade_top5@5s"] = r.ade5_5s;
  j["ade_top10@3s"] = r.ade10_3s;
  j["ade_top10@5s"] = r.ade10_5s;
  j["n"] = r.n;
  return j;
}

inline std::string format_table(const EvalReport & r)
{
  char buf[160];
  std::string out;
  auto row = [&](const char * name, double v) {
    std::snprintf(buf, sizeof(buf), "  %-16s %10.4f\n", name, v);
    out += buf;
  };
  std::snprintf(buf, sizeof(buf), "samples: %zu\n", r.n);
  out += buf;
  row("RFS overall", r.rfs.overall);
  row("RFS @3s", r.rfs.rfs_3s);
  row("RFS @5s", r.rfs.rfs_5s);
  row("ADE top-1 @3s", r.ade1_3s);
  row("ADE top-1 @5s", r.ade1_5s);
  row("ADE top-5 @3s", r.ade5_3s);
  row("ADE top-5 @5s", r.ade5_5s);
  row("ADE top-10 @3s", r.ade10_3s);
  row("ADE top-10 @5s", r.ade10_5s);
  if (!r.rfs.per_category.empty()) {
    out += "RFS by category:\n";
    for (const auto & [k, v] : r.rfs.per_category) {
      row(k.c_str(), v);
    }
  }
  return out;
}

}  // namespace mtrvp::metrics

#endif  // MTRVP__METRICS__REPORT_HPP_
