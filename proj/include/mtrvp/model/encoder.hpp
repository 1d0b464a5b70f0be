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

#ifndef MTRVP__MODEL__ENCODER_HPP_
#define MTRVP__MODEL__ENCODER_HPP_

#include <string>
#include <vector>

#include "mtrvp/core/types.hpp"
#include "mtrvp/diffmath/attention.hpp"
#include "mtrvp/diffmath/ops.hpp"
#include "mtrvp/model/params.hpp"

namespace mtrvp::model
{

enum class EncoderVariant { Concat, VisionFusion };

inline const char * to_string(EncoderVariant v)
{
  return v == EncoderVariant::Concat ? "concat" : "vision_fusion";
}

struct EncoderConfig
{
  std::size_t d_model{64};
  std::size_t heads{8};
  std::size_t layers{4};
  std::size_t d_vis{64};
  EncoderVariant variant{EncoderVariant::Concat};

  void validate() const
  {
    if (d_model == 0 || heads == 0 || d_model % heads != 0) {
      throw InvariantError(
        "encoder d_model " + std::to_string(d_model) + " not divisible by " + std::to_string(heads) +
        " heads");
    }
    if (d_vis == 0) {
      throw InvariantError("encoder d_vis must be positive");
    }
  }
};

/// Scene context tokens [B x L_ctx x d_model]: 17 for Concat, 16 for VisionFusion.
struct SceneContext
{
  Tensor tokens;

  std::size_t batch() const { return tokens.dim(0); }
  std::size_t length() const { return tokens.dim(1); }
  std::size_t width() const { return tokens.dim(2); }
};

/**
 * @brief Pre-norm transformer block: x += MHA(LN(x)); x += FFN(LN(x)).
 *
 * Feedforward width is 4 * d_model with ReLU.
 */
struct EncoderBlock
{
  LayerNormParams ln1;
  diffmath::ProjectionParams attn;
  LayerNormParams ln2;
  LinearParams ff1;
  LinearParams ff2;
  std::size_t heads{1};

  static EncoderBlock create(
    ParameterSet & ps, const std::string & name, std::size_t d, std::size_t heads, Rng & rng)
  {
    EncoderBlock b;
    b.ln1 = LayerNormParams::create(ps, name + ".ln1", d);
    b.attn = make_attention_params(ps, name + ".attn", d, d, d, d, rng);
    b.ln2 = LayerNormParams::create(ps, name + ".ln2", d);
    b.ff1 = LinearParams::create(ps, name + ".ff1", d, 4 * d, rng);
    b.ff2 = LinearParams::create(ps, name + ".ff2", 4 * d, d, rng);
    b.heads = heads;
    return b;
  }

  Tensor operator()(diffmath::Tape & tape, const Tensor & x) const
  {
    using namespace diffmath;
    const Tensor h = ln1(tape, x);
    const Tensor x1 = add(tape, x, multi_head_attention(tape, h, h, h, attn, heads));
    const Tensor h2 = ln2(tape, x1);
    return add(tape, x1, ff2(tape, relu(tape, ff1(tape, h2))));
  }
};

/**
 * @brief Scene context encoder over (normalised) state history and visual tokens.
 *
 * States are embedded per step (6 -> d_model), offset by a learned per-index
 * positional embedding, and run through `layers` self-attention blocks.
 */
class SceneEncoder
{
public:
  SceneEncoder() = default;

  SceneEncoder(const EncoderConfig & cfg, ParameterSet & ps, Rng & rng) : cfg_(cfg)
  {
    cfg_.validate();
    const std::size_t d = cfg_.d_model;
    state_embed_ = LinearParams::create(ps, "encoder.state_embed", kStateDim, d, rng);
    Tensor pos({kHistorySteps, d});
    for (auto & v : pos.data()) {
      v = 0.02 * rng.normal();
    }
    pos_embed_ = ps.add("encoder.pos_embed", pos);
    for (std::size_t l = 0; l < cfg_.layers; ++l) {
      blocks_.push_back(EncoderBlock::create(ps, "encoder.block" + std::to_string(l), d, cfg_.heads, rng));
    }
    visual_proj_ = LinearParams::create(ps, "encoder.visual_proj", cfg_.d_vis, d, rng);
    if (cfg_.variant == EncoderVariant::VisionFusion) {
      fusion_ = make_attention_params(ps, "encoder.fusion", d, d, d, d, rng);
    }
  }

  const EncoderConfig & config() const { return cfg_; }

  /// states: [B x 16 x 6] -> [B x 16 x d_model]
  Tensor embed_states(diffmath::Tape & tape, const Tensor & states) const
  {
    if (states.rank() != 3 || states.dim(1) != kHistorySteps || states.dim(2) != kStateDim) {
      throw ShapeError("encoder: states must be [B x 16 x 6], got " + diffmath::shape_str(states.shape()));
    }
    Tensor x = diffmath::add(tape, state_embed_(tape, states), pos_embed_);
    for (const auto & block : blocks_) {
      x = block(tape, x);
    }
    return x;
  }

  /// Projects visual tokens [B x P x d_vis] to [B x P x d_model].
  Tensor project_visual(diffmath::Tape & tape, const Tensor & visual) const
  {
    if (visual.rank() != 3 || visual.dim(2) != cfg_.d_vis) {
      throw ShapeError(
        "encoder: visual must be [B x P x " + std::to_string(cfg_.d_vis) + "], got " +
        diffmath::shape_str(visual.shape()));
    }
    return visual_proj_(tape, visual);
  }

  /// 16 state tokens followed by the single projected visual token.
  SceneContext encode_concat(diffmath::Tape & tape, const Tensor & states, const Tensor & visual) const
  {
    const Tensor s = embed_states(tape, states);
    if (visual.rank() != 3 || visual.dim(1) != 1) {
      throw ShapeError("encoder: concat variant takes exactly one visual token per sample");
    }
    if (visual.dim(0) != s.dim(0)) {
      throw ShapeError("encoder: visual batch does not match state batch");
    }
    const Tensor v = project_visual(tape, visual);
    return {diffmath::concat(tape, {s, v}, 1)};
  }

  /// State tokens attend to the projected visual tokens; result is residual-added.
  SceneContext encode_vision_fusion(
    diffmath::Tape & tape, const Tensor & states, const Tensor & visual) const
  {
    if (cfg_.variant != EncoderVariant::VisionFusion) {
      throw InvariantError("encoder was not built with the vision-fusion variant");
    }
    const Tensor s = embed_states(tape, states);
    if (visual.rank() != 3 || visual.dim(0) != s.dim(0) || visual.dim(1) == 0) {
      throw ShapeError("encoder: visual must be [B x P x d_vis] with P >= 1");
    }
    const Tensor v = project_visual(tape, visual);
    return {diffmath::add(tape, s, diffmath::multi_head_attention(tape, s, v, v, fusion_, cfg_.heads))};
  }

  SceneContext encode(diffmath::Tape & tape, const Tensor & states, const Tensor & visual) const
  {
    return cfg_.variant == EncoderVariant::Concat ? encode_concat(tape, states, visual)
                                                  : encode_vision_fusion(tape, states, visual);
  }

private:
  EncoderConfig cfg_;
  LinearParams state_embed_;
  Tensor pos_embed_;
  std::vector<EncoderBlock> blocks_;
  LinearParams visual_proj_;
  diffmath::ProjectionParams fusion_;
};

}  // namespace mtrvp::model

#endif  // MTRVP__MODEL__ENCODER_HPP_
