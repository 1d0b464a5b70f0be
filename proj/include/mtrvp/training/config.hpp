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

#ifndef MTRVP__TRAINING__CONFIG_HPP_
#define MTRVP__TRAINING__CONFIG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mtrvp/model/model.hpp"
#include "mtrvp/training/adam.hpp"

namespace mtrvp::training
{

enum class Ablation { None, BlankVisual, SingleTrajectory };

inline const char * to_string(Ablation a)
{
  switch (a) {
    case Ablation::None: return "none";
    case Ablation::BlankVisual: return "blank_visual";
    default: return "single_trajectory";
  }
}

inline Ablation ablation_from_string(const std::string & s)
{
  if (s == "none" || s == "full") return Ablation::None;
  if (s == "blank_visual") return Ablation::BlankVisual;
  if (s == "single_trajectory") return Ablation::SingleTrajectory;
  throw std::invalid_argument("unknown ablation '" + s + "'");
}

// Constant keeps the configured lr; Cosine anneals it to zero over the run.
enum class LrSchedule { Constant, Cosine };

inline const char * to_string(LrSchedule s) { return s == LrSchedule::Cosine ? "cosine" : "constant"; }

inline LrSchedule lr_schedule_from_string(const std::string & s)
{
  if (s == "constant") return LrSchedule::Constant;
  if (s == "cosine") return LrSchedule::Cosine;
  throw std::invalid_argument("unknown lr schedule '" + s + "'");
}

inline model::EncoderVariant variant_from_string(const std::string & s)
{
  if (s == "concat") return model::EncoderVariant::Concat;
  if (s == "vision_fusion") return model::EncoderVariant::VisionFusion;
  throw std::invalid_argument("unknown encoder variant '" + s + "'");
}

inline model::QueryMode query_mode_from_string(const std::string & s)
{
  if (s == "intent_only") return model::QueryMode::IntentOnly;
  if (s == "fused_query") return model::QueryMode::FusedQuery;
  throw std::invalid_argument("unknown query mode '" + s + "'");
}

struct TrainConfig
{
  AdamConfig adam;
  LrSchedule lr_schedule{LrSchedule::Constant};
  std::size_t batch_size{32};
  std::size_t epochs{30};
  std::uint64_t seed{0};
  Ablation ablation{Ablation::None};
  double lambda{1.0};
  double train_ratio{0.8};
  // Zero the visual projection weight and keep it frozen; the visual token
  // then carries no input information.
  bool zero_visual_projection{false};
  model::ModelConfig model;

  void validate() const
  {
    if (!(adam.lr > 0.0)) throw InvariantError("lr must be > 0");
    if (batch_size < 1) throw InvariantError("batch_size must be >= 1");
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw InvariantError("train_ratio must lie in (0, 1)");
    model.encoder.validate();
    model.decoder.validate();
  }

  /// Model config after applying the ablation switches.
  model::ModelConfig effective_model() const
  {
    model::ModelConfig m = model;
    if (ablation == Ablation::SingleTrajectory) {
      m.decoder.num_modes = 1;
    }
    return m;
  }
};

/// Learning rate for the Adam step numbered `step` (0-based) out of `total`.
inline double scheduled_lr(const TrainConfig & c, std::size_t step, std::size_t total)
{
  if (c.lr_schedule == LrSchedule::Constant || total == 0) return c.adam.lr;
  const double t = std::min(1.0, static_cast<double>(step) / static_cast<double>(total));
  return 0.5 * c.adam.lr * (1.0 + std::cos(std::numbers::pi * t));
}

inline nlohmann::json to_json(const model::ModelConfig & m)
{
  return {
    {"encoder",
     {{"d_model", m.encoder.d_model},
      {"heads", m.encoder.heads},
      {"layers", m.encoder.layers},
      {"d_vis", m.encoder.d_vis},
      {"variant", model::to_string(m.encoder.variant)}}},
    {"decoder",
     {{"d_intent", m.decoder.d_intent},
      {"d_attn", m.decoder.d_attn},
      {"heads", m.decoder.heads},
      {"k", m.decoder.num_modes},
      {"horizon", m.decoder.horizon},
      {"query_mode", model::to_string(m.decoder.query_mode)},
      {"aux_a_dim", m.decoder.aux_a_dim},
      {"aux_b_dim", m.decoder.aux_b_dim},
      {"cumulative", m.decoder.cumulative}}}};
}

inline model::ModelConfig model_config_from_json(const nlohmann::json & j)
{
  model::ModelConfig m;
  const auto & e = j.at("encoder");
  m.encoder.d_model = e.at("d_model").get<std::size_t>();
  m.encoder.heads = e.at("heads").get<std::size_t>();
  m.encoder.layers = e.at("layers").get<std::size_t>();
  m.encoder.d_vis = e.at("d_vis").get<std::size_t>();
  m.encoder.variant = variant_from_string(e.at("variant").get<std::string>());
  const auto & d = j.at("decoder");
  m.decoder.d_intent = d.at("d_intent").get<std::size_t>();
  m.decoder.d_attn = d.at("d_attn").get<std::size_t>();
  m.decoder.heads = d.at("heads").get<std::size_t>();
  m.decoder.num_modes = d.at("k").get<std::size_t>();
  m.decoder.horizon = d.at("horizon").get<std::size_t>();
  m.decoder.query_mode = query_mode_from_string(d.at("query_mode").get<std::string>());
  m.decoder.aux_a_dim = d.at("aux_a_dim").get<std::size_t>();
  m.decoder.aux_b_dim = d.at("aux_b_dim").get<std::size_t>();
  m.decoder.cumulative = d.at("cumulative").get<bool>();
  return m;
}

inline nlohmann::json to_json(const TrainConfig & c)
{
  return {
    {"lr", c.adam.lr},
    {"beta1", c.adam.beta1},
    {"beta2", c.adam.beta2},
    {"eps", c.adam.eps},
    {"grad_clip", c.adam.grad_clip},
    {"lr_schedule", to_string(c.lr_schedule)},
    {"batch_size", c.batch_size},
    {"epochs", c.epochs},
    {"seed", c.seed},
    {"ablation", to_string(c.ablation)},
    {"lambda", c.lambda},
    {"train_ratio", c.train_ratio},
    {"zero_visual_projection", c.zero_visual_projection},
    {"model", to_json(c.model)}};
}

inline TrainConfig train_config_from_json(const nlohmann::json & j)
{
  TrainConfig c;
  c.adam.lr = j.at("lr").get<double>();
  c.adam.beta1 = j.at("beta1").get<double>();
  c.adam.beta2 = j.at("beta2").get<double>();
  c.adam.eps = j.at("eps").get<double>();
  c.adam.grad_clip = j.at("grad_clip").get<double>();
  c.lr_schedule = lr_schedule_from_string(j.value("lr_schedule", std::string("constant")));
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.ablation = ablation_from_string(j.at("ablation").get<std::string>());
  c.lambda = j.at("lambda").get<double>();
  c.train_ratio = j.at("train_ratio").get<double>();
  c.zero_visual_projection = j.at("zero_visual_projection").get<bool>();
  c.model = model_config_from_json(j.at("model"));
  return c;
}

}  // namespace mtrvp::training

#endif  // MTRVP__TRAINING__CONFIG_HPP_
