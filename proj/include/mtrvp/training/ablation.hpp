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

#ifndef MTRVP__TRAINING__ABLATION_HPP_
#define MTRVP__TRAINING__ABLATION_HPP_

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtrvp/metrics/report.hpp"
#include "mtrvp/training/trainer.hpp"

namespace mtrvp::training
{

/// Sets the visual and auxiliary widths of `cfg` from the first scenario.
inline void fit_widths_to_data(model::ModelConfig & cfg, const std::vector<Scenario> & data)
{
  if (data.empty()) {
    throw InvariantError("cannot infer feature widths from an empty dataset");
  }
  const auto & v = data.front().visual;
  cfg.encoder.d_vis = v.embedding.size();
  if (v.aux_a) cfg.decoder.aux_a_dim = v.aux_a->size();
  if (v.aux_b) cfg.decoder.aux_b_dim = v.aux_b->size();
}

struct GridCell
{
  model::EncoderVariant variant;
  Ablation ablation;
  model::QueryMode query;
  metrics::EvalReport report;
  double final_train_loss{0.0};
};

struct GridAxes
{
  std::vector<model::EncoderVariant> variants{model::EncoderVariant::Concat, model::EncoderVariant::VisionFusion};
  std::vector<Ablation> ablations{Ablation::None, Ablation::BlankVisual, Ablation::SingleTrajectory};
  std::vector<model::QueryMode> queries{model::QueryMode::IntentOnly, model::QueryMode::FusedQuery};

  std::size_t size() const { return variants.size() * ablations.size() * queries.size(); }
};

/**
 * @brief Trains and evaluates every (variant, ablation, query) cell on the
 * same data and seed; cells are scored on their own validation split, which
 * is identical across cells because it depends only on the seed.
 */
inline std::vector<GridCell> run_grid(
  const std::vector<Scenario> & data, const TrainConfig & base, const GridAxes & axes,
  const std::function<void(const GridCell &)> & on_cell = {})
{
  std::vector<GridCell> cells;
  cells.reserve(axes.size());
  for (auto variant : axes.variants) {
    for (auto query : axes.queries) {
      for (auto ablation : axes.ablations) {
        TrainConfig cfg = base;
        cfg.model.encoder.variant = variant;
        cfg.model.decoder.query_mode = query;
        cfg.ablation = ablation;
        Trainer t(data, cfg);
        t.run();
        GridCell c{variant, ablation, query, metrics::evaluate(t.model().predict(t.val_set()), t.val_set()),
                   t.log().empty() ? 0.0 : t.log().back().train_loss};
        cells.push_back(c);
        if (on_cell) on_cell(cells.back());
      }
    }
  }
  return cells;
}

/// The full-input cell sharing variant and query with `c`, if it was run.
inline const GridCell * full_partner(const std::vector<GridCell> & cells, const GridCell & c)
{
  for (const auto & o : cells) {
    if (o.variant == c.variant && o.query == c.query && o.ablation == Ablation::None) return &o;
  }
  return nullptr;
}

inline nlohmann::json grid_to_json(const std::vector<GridCell> & cells)
{
  nlohmann::json rows = nlohmann::json::array();
  for (const auto & c : cells) {
    nlohmann::json r = metrics::to_json(c.report);
    r["variant"] = model::to_string(c.variant);
    r["ablation"] = to_string(c.ablation);
    r["query"] = model::to_string(c.query);
    r["final_train_loss"] = c.final_train_loss;
    if (const auto * f = full_partner(cells, c); f && f != &c) {
      r["delta_ade1@3s"] = c.report.ade1_3s - f->report.ade1_3s;
      r["delta_ade1@5s"] = c.report.ade1_5s - f->report.ade1_5s;
      r["delta_rfs"] = c.report.rfs.overall - f->report.rfs.overall;
    }
    rows.push_back(std::move(r));
  }
  return {{"rows", rows}};
}

/// Aligned text table; deltas are relative to the full-input row of the same variant/query.
inline std::string grid_table(const std::vector<GridCell> & cells)
{
  std::string out;
  char buf[256];
  std::snprintf(
    buf, sizeof(buf), "%-14s %-12s %-18s %9s %9s %8s %10s %10s\n", "variant", "query", "ablation", "ADE@3s",
    "ADE@5s", "RFS", "dADE@3s", "dADE@5s");
  out += buf;
  for (const auto & c : cells) {
    const auto * f = full_partner(cells, c);
    const bool paired = f && f != &c;
    char d3[32] = "-", d5[32] = "-";
    if (paired) {
      std::snprintf(d3, sizeof(d3), "%+.4f", c.report.ade1_3s - f->report.ade1_3s);
      std::snprintf(d5, sizeof(d5), "%+.4f", c.report.ade1_5s - f->report.ade1_5s);
    }
    std::snprintf(
      buf, sizeof(buf), "%-14s %-12s %-18s %9.4f %9.4f %8.4f %10s %10s\n", model::to_string(c.variant),
      model::to_string(c.query), to_string(c.ablation), c.report.ade1_3s, c.report.ade1_5s, c.report.rfs.overall, d3,
      d5);
    out += buf;
  }
  // Per-category RFS, one column per category.
  if (!cells.empty()) {
    out += "\nRFS by category\n";
    std::snprintf(buf, sizeof(buf), "%-14s %-12s %-18s", "variant", "query", "ablation");
    out += buf;
    for (const auto & [cat, v] : cells.front().report.rfs.per_category) {
      std::snprintf(buf, sizeof(buf), " %15.15s", cat.c_str());
      out += buf;
    }
    out += '\n';
    for (const auto & c : cells) {
      std::snprintf(
        buf, sizeof(buf), "%-14s %-12s %-18s", model::to_string(c.variant), model::to_string(c.query),
        to_string(c.ablation));
      out += buf;
      for (const auto & [cat, v] : c.report.rfs.per_category) {
        std::snprintf(buf, sizeof(buf), " %15.4f", v);
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace mtrvp::training

#endif  // MTRVP__TRAINING__ABLATION_HPP_
