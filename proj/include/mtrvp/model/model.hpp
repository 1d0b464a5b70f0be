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

#ifndef MTRVP__MODEL__MODEL_HPP_
#define MTRVP__MODEL__MODEL_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mtrvp/core/types.hpp"
#include "mtrvp/diffmath/random.hpp"
#include "mtrvp/model/decoder.hpp"
#include "mtrvp/model/encoder.hpp"
#include "mtrvp/model/params.hpp"

namespace mtrvp::model
{

struct ModelConfig
{
  EncoderConfig encoder;
  DecoderConfig decoder;
};

/**
 * @brief Input standardisation constants and the trajectory output scale.
 *
 * Fitted on the training split and stored with the checkpoint.
 */
struct Normalization
{
  std::array<double, kStateDim> state_mean{};
  std::array<double, kStateDim> state_std{1, 1, 1, 1, 1, 1};
  std::array<double, 2> output_scale{1, 1};

  /// Per-channel mean/std of history states; output scale is the per-axis RMS
  /// of per-step displacement (cumulative head) or of positions (direct head).
  static Normalization fit(const std::vector<Scenario> & data, bool cumulative)
  {
    Normalization n;
    if (data.empty()) {
      return n;
    }
    std::array<double, kStateDim> sum{};
    std::array<double, kStateDim> sq{};
    std::size_t count = 0;
    for (const auto & s : data) {
      for (const auto & e : s.history.steps) {
        for (std::size_t c = 0; c < kStateDim; ++c) {
          sum[c] += e[c];
        }
        ++count;
      }
    }
    for (std::size_t c = 0; c < kStateDim; ++c) {
      n.state_mean[c] = sum[c] / static_cast<double>(count);
    }
    for (const auto & s : data) {
      for (const auto & e : s.history.steps) {
        for (std::size_t c = 0; c < kStateDim; ++c) {
          const double d = e[c] - n.state_mean[c];
          sq[c] += d * d;
        }
      }
    }
    for (std::size_t c = 0; c < kStateDim; ++c) {
      const double sd = std::sqrt(sq[c] / static_cast<double>(count));
      n.state_std[c] = sd > 1e-6 ? sd : 1.0;
    }
    std::array<double, 2> acc{};
    std::size_t m = 0;
    for (const auto & s : data) {
      Vec2 prev{};
      for (const auto & w : s.driven_future.waypoints) {
        const Vec2 v = cumulative ? w - prev : w;
        acc[0] += v.x * v.x;
        acc[1] += v.y * v.y;
        prev = w;
        ++m;
      }
    }
    for (std::size_t c = 0; c < 2; ++c) {
      const double rms = std::sqrt(acc[c] / static_cast<double>(m));
      n.output_scale[c] = rms > 1e-3 ? rms : 1.0;
    }
    return n;
  }
};

/// Model inputs for B samples, already normalised.
struct Batch
{
  Tensor states;  // [B x 16 x 6]
  Tensor visual;  // [B x 1 x d_vis]
  Tensor aux_a;   // [B x 1 x aux_a_dim], fused-query mode only
  Tensor aux_b;   // [B x 1 x aux_b_dim], fused-query mode only
  std::vector<Intent> intents;
  std::vector<Trajectory> targets;

  std::size_t size() const { return intents.size(); }
};

/**
 * @brief Encoder plus decoder with their parameters and normalisation.
 *
 * Not copyable: parameters are shared handles owned through the ParameterSet.
 */
class MtrVpModel
{
public:
  MtrVpModel(const ModelConfig & cfg, std::uint64_t seed) : cfg_(cfg), output_scale_({2}, 1.0)
  {
    Rng rng(seed, 0x6d6f64656cULL);
    Rng enc_rng = rng.split(1);
    Rng dec_rng = rng.split(2);
    encoder_ = SceneEncoder(cfg_.encoder, params_, enc_rng);
    decoder_ = TrajectoryDecoder(cfg_.decoder, cfg_.encoder.d_model, params_, dec_rng);
    decoder_.set_output_scale(output_scale_);
    set_normalization(norm_);
  }

  MtrVpModel(const MtrVpModel &) = delete;
  MtrVpModel & operator=(const MtrVpModel &) = delete;
  MtrVpModel(MtrVpModel &&) = default;
  MtrVpModel & operator=(MtrVpModel &&) = default;

  const ModelConfig & config() const { return cfg_; }
  ParameterSet & params() { return params_; }
  const ParameterSet & params() const { return params_; }
  const SceneEncoder & encoder() const { return encoder_; }
  const TrajectoryDecoder & decoder() const { return decoder_; }

  const Normalization & normalization() const { return norm_; }
  void set_normalization(const Normalization & n)
  {
    norm_ = n;
    output_scale_.ptr()[0] = n.output_scale[0];
    output_scale_.ptr()[1] = n.output_scale[1];
  }

  Batch make_batch(const std::vector<const Scenario *> & samples) const
  {
    const std::size_t batch = samples.size();
    const std::size_t d_vis = cfg_.encoder.d_vis;
    const bool fused = cfg_.decoder.query_mode == QueryMode::FusedQuery;
    Batch out;
    out.states = Tensor({batch, kHistorySteps, kStateDim});
    out.visual = Tensor({batch, 1, d_vis});
    if (fused) {
      out.aux_a = Tensor({batch, 1, cfg_.decoder.aux_a_dim});
      out.aux_b = Tensor({batch, 1, cfg_.decoder.aux_b_dim});
    }
    for (std::size_t b = 0; b < batch; ++b) {
      const Scenario & s = *samples[b];
      if (s.history.steps.size() != kHistorySteps) {
        throw ShapeError("scenario '" + s.id + "' history is not 16 steps");
      }
      if (s.visual.embedding.size() != d_vis) {
        throw ShapeError(
          "scenario '" + s.id + "' visual width " + std::to_string(s.visual.embedding.size()) +
          " != d_vis " + std::to_string(d_vis));
      }
      for (std::size_t t = 0; t < kHistorySteps; ++t) {
        for (std::size_t c = 0; c < kStateDim; ++c) {
          out.states.ptr()[(b * kHistorySteps + t) * kStateDim + c] =
            (s.history.steps[t][c] - norm_.state_mean[c]) / norm_.state_std[c];
        }
      }
      std::copy(s.visual.embedding.begin(), s.visual.embedding.end(), out.visual.ptr() + b * d_vis);
      if (fused) {
        copy_aux(s.visual.aux_a, cfg_.decoder.aux_a_dim, out.aux_a.ptr() + b * cfg_.decoder.aux_a_dim, s.id, "aux_a");
        copy_aux(s.visual.aux_b, cfg_.decoder.aux_b_dim, out.aux_b.ptr() + b * cfg_.decoder.aux_b_dim, s.id, "aux_b");
      }
      out.intents.push_back(s.intent);
      out.targets.push_back(s.driven_future);
    }
    return out;
  }

  DecoderOutput forward(diffmath::Tape & tape, const Batch & batch) const
  {
    const SceneContext ctx = encoder_.encode(tape, batch.states, batch.visual);
    const Tensor query = decoder_.make_query(tape, batch.intents, batch.aux_a, batch.aux_b);
    return decoder_.decode(tape, query, ctx);
  }

  /// Inference over a dataset in fixed-size chunks, without recording gradients.
  std::vector<PredictionSet> predict(const std::vector<Scenario> & data, std::size_t chunk = 64) const
  {
    std::vector<PredictionSet> out;
    out.reserve(data.size());
    for (std::size_t start = 0; start < data.size(); start += chunk) {
      std::vector<const Scenario *> ptrs;
      for (std::size_t i = start; i < std::min(data.size(), start + chunk); ++i) {
        ptrs.push_back(&data[i]);
      }
      diffmath::Tape tape;
      tape.set_enabled(false);
      const auto res = forward(tape, make_batch(ptrs));
      for (auto & p : to_prediction_sets(res)) {
        out.push_back(std::move(p));
      }
    }
    return out;
  }

private:
  static void copy_aux(
    const std::optional<std::vector<double>> & src, std::size_t dim, double * dst, const std::string & id,
    const char * name)
  {
    if (!src) {
      throw InvariantError("scenario '" + id + "' lacks " + name + " required by the fused query");
    }
    if (src->size() != dim) {
      throw ShapeError("scenario '" + id + "' " + name + " width does not match the decoder config");
    }
    std::copy(src->begin(), src->end(), dst);
  }

  ModelConfig cfg_;
  ParameterSet params_;
  SceneEncoder encoder_;
  TrajectoryDecoder decoder_;
  Normalization norm_;
  Tensor output_scale_;
};

}  // namespace mtrvp::model

#endif  // MTRVP__MODEL__MODEL_HPP_
