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

#ifndef MTRVP__MODEL__DECODER_HPP_
#define MTRVP__MODEL__DECODER_HPP_

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mtrvp/core/types.hpp"
#include "mtrvp/diffmath/attention.hpp"
#include "mtrvp/diffmath/ops.hpp"
#include "mtrvp/model/encoder.hpp"
#include "mtrvp/model/params.hpp"

namespace mtrvp::model
{

enum class QueryMode { IntentOnly, FusedQuery };

inline const char * to_string(QueryMode q)
{
  return q == QueryMode::IntentOnly ? "intent_only" : "fused_query";
}

struct DecoderConfig
{
  std::size_t d_intent{128};
  std::size_t d_attn{512};
  std::size_t heads{8};
  std::size_t num_modes{20};
  std::size_t horizon{kFutureSteps};
  QueryMode query_mode{QueryMode::IntentOnly};
  std::size_t aux_a_dim{kDefaultAuxADim};
  std::size_t aux_b_dim{kDefaultAuxBDim};
  // Head emits per-step displacements that are prefix-summed into waypoints.
  bool cumulative{true};

  void validate() const
  {
    if (num_modes < 1) {
      throw InvariantError("decoder needs K >= 1");
    }
    if (horizon != kFutureSteps) {
      throw InvariantError("decoder horizon must be " + std::to_string(kFutureSteps));
    }
    if (heads == 0 || d_attn % heads != 0) {
      throw InvariantError("decoder d_attn not divisible by heads");
    }
  }
};

struct DecoderOutput
{
  Tensor trajectories;  // [B x K x 20 x 2]
  Tensor logits;        // [B x K]
  Tensor probs;         // [B x K]
};

/// One-hot encoding [B x 1 x 3] of intents.
inline Tensor one_hot_intents(const std::vector<Intent> & intents)
{
  Tensor t({intents.size(), 1, kNumIntents});
  for (std::size_t b = 0; b < intents.size(); ++b) {
    t.ptr()[b * kNumIntents + intent_index(intents[b])] = 1.0;
  }
  return t;
}

/**
 * @brief Intent-conditioned cross-attention decoder.
 *
 * The query token (intent embedding, optionally fused with auxiliary scene
 * embeddings) attends over the scene context. The attended vector feeds a
 * trajectory head (d_attn -> K*20*2) and a mode head (d_attn -> K, softmax).
 */
class TrajectoryDecoder
{
public:
  TrajectoryDecoder() = default;

  TrajectoryDecoder(const DecoderConfig & cfg, std::size_t d_model, ParameterSet & ps, Rng & rng)
  : cfg_(cfg)
  {
    cfg_.validate();
    intent_embed_ = LinearParams::create(ps, "decoder.intent_embed", kNumIntents, cfg_.d_intent, rng);
    if (cfg_.query_mode == QueryMode::FusedQuery) {
      const std::size_t in = cfg_.d_intent + cfg_.aux_a_dim + cfg_.aux_b_dim;
      fuse1_ = LinearParams::create(ps, "decoder.fuse1", in, cfg_.d_intent, rng);
      fuse2_ = LinearParams::create(ps, "decoder.fuse2", cfg_.d_intent, cfg_.d_intent, rng);
    }
    attn_ = make_attention_params(ps, "decoder.cross_attn", cfg_.d_intent, d_model, cfg_.d_attn, cfg_.d_attn, rng);
    traj_head_ = LinearParams::create(ps, "decoder.traj_head", cfg_.d_attn, cfg_.num_modes * cfg_.horizon * 2, rng);
    mode_head_ = LinearParams::create(ps, "decoder.mode_head", cfg_.d_attn, cfg_.num_modes, rng);
  }

  const DecoderConfig & config() const { return cfg_; }

  /// [B x 1 x d_intent]
  Tensor embed_intent(diffmath::Tape & tape, const std::vector<Intent> & intents) const
  {
    return intent_embed_(tape, one_hot_intents(intents));
  }

  /**
   * @brief Fused query: e + FCN([e; aux_a; aux_b]) with e the intent embedding.
   *
   * The FCN is linear -> ReLU -> linear. Zeroing its output layer reduces the
   * query to the plain intent embedding.
   */
  Tensor fuse_query(
    diffmath::Tape & tape, const std::vector<Intent> & intents, const Tensor & aux_a,
    const Tensor & aux_b) const
  {
    if (cfg_.query_mode != QueryMode::FusedQuery) {
      throw InvariantError("decoder was not built with the fused-query mode");
    }
    const std::size_t batch = intents.size();
    if (!aux_a.defined() || !aux_b.defined()) {
      throw InvariantError("fused query requires aux_a and aux_b embeddings");
    }
    if (aux_a.numel() != batch * cfg_.aux_a_dim || aux_b.numel() != batch * cfg_.aux_b_dim) {
      throw ShapeError("fused query: aux embedding widths do not match the decoder config");
    }
    using namespace diffmath;
    const Tensor e = embed_intent(tape, intents);
    const Tensor a = aux_a.rank() == 3 ? aux_a : reshape(tape, aux_a, {batch, 1, cfg_.aux_a_dim});
    const Tensor b = aux_b.rank() == 3 ? aux_b : reshape(tape, aux_b, {batch, 1, cfg_.aux_b_dim});
    const Tensor h = relu(tape, fuse1_(tape, concat(tape, {e, a, b}, 2)));
    return add(tape, e, fuse2_(tape, h));
  }

  Tensor make_query(
    diffmath::Tape & tape, const std::vector<Intent> & intents, const Tensor & aux_a,
    const Tensor & aux_b) const
  {
    return cfg_.query_mode == QueryMode::FusedQuery ? fuse_query(tape, intents, aux_a, aux_b)
                                                    : embed_intent(tape, intents);
  }

  DecoderOutput decode(diffmath::Tape & tape, const Tensor & query, const SceneContext & ctx) const
  {
    using namespace diffmath;
    const std::size_t batch = ctx.batch();
    if (query.rank() != 3 || query.dim(0) != batch || query.dim(1) != 1 || query.dim(2) != cfg_.d_intent) {
      throw ShapeError("decoder: query must be [B x 1 x d_intent], got " + shape_str(query.shape()));
    }
    if (ctx.width() != attn_.wk.dim(0)) {
      throw ShapeError("decoder: scene context width does not match key projection");
    }
    const Tensor att = multi_head_attention(tape, query, ctx.tokens, ctx.tokens, attn_, cfg_.heads);
    const Tensor flat = reshape(tape, att, {batch, cfg_.d_attn});
    const std::size_t k = cfg_.num_modes;
    Tensor traj = reshape(tape, traj_head_(tape, flat), {batch, k, cfg_.horizon, 2});
    if (output_scale_.defined()) {
      traj = mul(tape, traj, output_scale_);
    }
    if (cfg_.cumulative) {
      traj = cumsum(tape, traj, 2);
    }
    const Tensor logits = mode_head_(tape, flat);
    const Tensor probs = softmax(tape, logits, 1);
    return {traj, logits, probs};
  }

  /// Per-axis multiplier [2] applied to the head output before the prefix sum.
  void set_output_scale(const Tensor & s) { output_scale_ = s; }
  const Tensor & output_scale() const { return output_scale_; }

private:
  DecoderConfig cfg_;
  LinearParams intent_embed_;
  LinearParams fuse1_;
  LinearParams fuse2_;
  diffmath::ProjectionParams attn_;
  LinearParams traj_head_;
  LinearParams mode_head_;
  Tensor output_scale_;
};

/**
 * @brief Mode indices ordered by descending probability; ties keep the lower index first.
 */
inline std::vector<std::size_t> rank_modes(const std::vector<double> & probs)
{
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return probs[a] > probs[b];
  });
  return order;
}

struct RankedMode
{
  std::size_t index;
  Trajectory trajectory;
  double prob;
};

/// The k most probable modes, most probable first. Throws if k is outside [1, K].
inline std::vector<RankedMode> select_topk(const PredictionSet & p, std::size_t k)
{
  if (k < 1 || k > p.size()) {
    throw std::out_of_range(
      "top-k: k=" + std::to_string(k) + " outside [1, " + std::to_string(p.size()) + "]");
  }
  const auto order = rank_modes(p.probs);
  std::vector<RankedMode> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back({order[i], p.modes[order[i]], p.probs[order[i]]});
  }
  return out;
}

/// Converts a batched decoder output into one PredictionSet per sample.
inline std::vector<PredictionSet> to_prediction_sets(const DecoderOutput & out)
{
  const std::size_t batch = out.trajectories.dim(0);
  const std::size_t k = out.trajectories.dim(1);
  const std::size_t horizon = out.trajectories.dim(2);
  std::vector<PredictionSet> sets(batch);
  const double * t = out.trajectories.ptr();
  for (std::size_t b = 0; b < batch; ++b) {
    auto & s = sets[b];
    s.modes.resize(k);
    s.probs.assign(out.probs.ptr() + b * k, out.probs.ptr() + (b + 1) * k);
    for (std::size_t m = 0; m < k; ++m) {
      auto & w = s.modes[m].waypoints;
      w.resize(horizon);
      for (std::size_t i = 0; i < horizon; ++i) {
        const std::size_t idx = ((b * k + m) * horizon + i) * 2;
        w[i] = {t[idx], t[idx + 1]};
      }
    }
  }
  return sets;
}

}  // namespace mtrvp::model

#endif  // MTRVP__MODEL__DECODER_HPP_
