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

// Acceptance run. Prints one PASS/FAIL line per criterion with the measured
// value next to its pinned tolerance; exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "mtrvp/mtrvp.hpp"
#include "oracles.hpp"

namespace
{

using namespace mtrvp;
using diffmath::Tape;
using diffmath::Tensor;
namespace fs = std::filesystem;

// Pinned tolerances.
constexpr double kRfsTol = 1e-12;
constexpr double kRfsSeconds = 5.0;
constexpr double kGradTol = 1e-4;
constexpr std::size_t kGradCoords = 10;
constexpr double kGradSeconds = 60.0;
constexpr double kMultiModeGain = 0.10;
constexpr double kMultiModeSeconds = 15.0 * 60.0;
constexpr double kVisionDegradation = 0.20;
constexpr double kProbSumTol = 1e-9;

struct Result
{
  bool pass;
  std::string detail;
};

class Clock
{
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char * f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

void note(const std::string & s)
{
  std::printf("    %s\n", s.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// 1. RFS against the independent re-evaluation.

Result metric_oracle()
{
  Clock clock;
  Rng rng(1001);
  double worst = 0.0;
  std::size_t cases = 0;
  auto compare = [&](const Trajectory & pred, const std::vector<RaterTrajectory> & raters) {
    for (int t : {3, 5}) {
      worst = std::max(worst, std::abs(metrics::rfs_single(pred, raters, t) - oracle::rater_score(pred, raters, t)));
    }
    ++cases;
  };
  const double speeds[] = {0.0, 1.0, 1.4, 6.2, 11.0, 14.0};
  for (int i = 0; i < 1000; ++i) {
    const auto base = fixture::random_trajectory(rng, 3.0);
    std::vector<RaterTrajectory> raters;
    const std::size_t n = 1 + rng.below(5);
    for (std::size_t r = 0; r < n; ++r) {
      // Some speeds land on the scale breakpoints, some scores tie.
      const double v = rng.uniform() < 0.3 ? speeds[rng.below(6)] : rng.uniform(0.0, 15.0);
      const double score = rng.uniform() < 0.2 ? 8.0 : rng.uniform(0.0, 10.0);
      raters.push_back({fixture::offset(base, {rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)}), score, v});
    }
    compare(fixture::offset(base, {rng.uniform(-4, 4), rng.uniform(-4, 4)}), raters);
  }

  // Anchored cases.
  bool anchors = true;
  const auto r = fixture::straight(5.0);
  anchors &= metrics::speed_scale(1.4) == 0.5 && metrics::speed_scale(11.0) == 1.0;
  anchors &= std::abs(metrics::speed_scale(std::nextafter(1.4, 0.0)) - 0.5) <= kRfsTol;
  anchors &= std::abs(metrics::speed_scale(std::nextafter(11.0, 0.0)) - 1.0) <= kRfsTol;
  // In-region at the 1.4 m/s and 11 m/s breakpoints: lateral half-widths 0.5 and 1.0 at 3 s.
  anchors &= metrics::rfs_single(fixture::offset(r, {0.0, 0.5}), {{r, 9.0, 1.4}}, 3) == 9.0;
  anchors &= metrics::rfs_single(fixture::offset(r, {0.0, 1.0}), {{r, 9.0, 11.0}}, 3) == 9.0;
  anchors &= metrics::rfs_single(fixture::offset(r, {0.0, 1.01}), {{r, 9.0, 11.0}}, 3) < 9.0;
  // No penalty at delta 0.5, the 0.6 example, the floor.
  anchors &= metrics::falloff_score(10.0, 0.5) == 10.0;
  anchors &= std::abs(metrics::rfs_single(fixture::offset(r, {0.0, 0.6}), {{r, 10.0, 0.0}}, 3) - 10.0 * std::pow(0.1, 0.1)) <= kRfsTol;
  anchors &= metrics::rfs_single(fixture::offset(r, {0.0, 2.0}), {{r, 8.0, 0.0}}, 3) == 4.0;
  for (const auto & [pred, raters] : std::vector<std::pair<Trajectory, std::vector<RaterTrajectory>>>{
         {fixture::offset(r, {0.0, 0.5}), {{r, 9.0, 1.4}}},
         {fixture::offset(r, {0.0, 1.0}), {{r, 9.0, 11.0}}},
         {fixture::offset(r, {0.0, 0.6}), {{r, 10.0, 0.0}}},
         {fixture::offset(r, {0.0, 2.0}), {{r, 8.0, 0.0}}}}) {
    compare(pred, raters);
  }

  const double secs = clock.seconds();
  return {worst <= kRfsTol && anchors && secs < kRfsSeconds,
          fmt("rfs oracle: %zu cases, max |diff| %.1e <= %.0e, anchored cases %s, %.2f s < %.0f s", cases, worst,
              kRfsTol, anchors ? "ok" : "WRONG", secs, kRfsSeconds)};
}

// ---------------------------------------------------------------------------
// 2. Finite-difference gradients.

model::ModelConfig grad_model(model::EncoderVariant v, model::QueryMode q)
{
  model::ModelConfig c;
  c.encoder.d_model = 16;
  c.encoder.heads = 4;
  c.encoder.layers = 2;
  c.encoder.d_vis = 8;
  c.encoder.variant = v;
  c.decoder.d_intent = 8;
  c.decoder.d_attn = 16;
  c.decoder.heads = 4;
  c.decoder.num_modes = 3;
  c.decoder.query_mode = q;
  c.decoder.aux_a_dim = 5;
  c.decoder.aux_b_dim = 6;
  return c;
}

Result gradient_integrity()
{
  Clock clock;
  using namespace diffmath;
  using oracle::random_tensor;
  Rng rng(2002);
  double worst = 0.0;
  std::size_t checks = 0, coords = 0;
  std::string worst_name;
  auto record = [&](const std::string & name, const oracle::GradCheck & g) {
    ++checks;
    coords += g.checked;
    if (g.max_rel_err >= worst) worst = g.max_rel_err, worst_name = name;
  };
  auto check = [&](const std::string & name, const std::function<Tensor(Tape &)> & f, std::vector<Tensor> in) {
    record(name, oracle::check_gradients(f, std::move(in), rng, kGradCoords));
  };

  {
    auto a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng), w = random_tensor({3, 2}, rng, false);
    check("matmul", [&](Tape & t) { return sum(t, mul(t, matmul(t, a, b), w)); }, {a, b});
  }
  {
    auto a = random_tensor({2, 3, 4}, rng), b = random_tensor({2, 4, 2}, rng), w = random_tensor({2, 3, 2}, rng, false);
    check("batched matmul", [&](Tape & t) { return sum(t, mul(t, matmul(t, a, b), w)); }, {a, b});
  }
  {
    auto a = random_tensor({2, 3, 4}, rng), b = random_tensor({3, 4}, rng), c = random_tensor({4}, rng);
    check("add/sub/mul/sum_sq", [&](Tape & t) { return sum_sq(t, mul(t, sub(t, add(t, a, b), c), add(t, a, c))); }, {a, b, c});
  }
  {
    auto a = random_tensor({5, 4}, rng);
    check("scale/relu/mean", [&](Tape & t) { return mean(t, relu(t, scale(t, a, -1.5))); }, {a});
  }
  {
    auto x = random_tensor({2, 3, 5}, rng), w = random_tensor({5, 4}, rng), b = random_tensor({4}, rng);
    check("linear", [&](Tape & t) { return sum_sq(t, linear(t, x, w, b)); }, {x, w, b});
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    auto x = random_tensor({2, 3, 4}, rng), w = random_tensor({2, 3, 4}, rng, false);
    check("softmax", [&](Tape & t) { return sum(t, mul(t, softmax(t, x, axis), w)); }, {x});
  }
  {
    auto x = random_tensor({3, 5}, rng), w = random_tensor({3, 5}, rng, false);
    check("log_softmax", [&](Tape & t) { return sum(t, mul(t, log_softmax(t, x, 1), w)); }, {x});
  }
  {
    auto x = random_tensor({3, 6}, rng), g = random_tensor({6}, rng), b = random_tensor({6}, rng);
    auto w = random_tensor({3, 6}, rng, false);
    check("layer_norm", [&](Tape & t) { return sum(t, mul(t, layer_norm(t, x, g, b), w)); }, {x, g, b});
  }
  {
    auto a = random_tensor({2, 3}, rng), b = random_tensor({2, 2}, rng), w = random_tensor({5, 2}, rng, false);
    check("reshape/concat/cumsum", [&](Tape & t) { return sum(t, mul(t, cumsum(t, reshape(t, concat(t, {a, b}, 1), {5, 2}), 0), w)); }, {a, b});
  }
  {
    auto x = random_tensor({3, 4, 2}, rng);
    check("select_per_row", [&](Tape & t) { return sum_sq(t, select_per_row(t, x, {2, 0, 3})); }, {x});
  }
  {
    auto q = random_tensor({2, 3, 8}, rng), k = random_tensor({2, 5, 8}, rng), v = random_tensor({2, 5, 8}, rng);
    auto w = random_tensor({2, 3, 8}, rng, false);
    check("attention", [&](Tape & t) { return sum(t, mul(t, scaled_dot_product_attention(t, q, k, v, 4), w)); }, {q, k, v});
  }
  {
    auto q = random_tensor({2, 1, 6}, rng), kv = random_tensor({2, 4, 5}, rng);
    ProjectionParams p{random_tensor({6, 8}, rng), random_tensor({8}, rng), random_tensor({5, 8}, rng),
                       random_tensor({8}, rng),    random_tensor({5, 8}, rng), random_tensor({8}, rng),
                       random_tensor({8, 3}, rng), random_tensor({3}, rng)};
    auto w = random_tensor({2, 1, 3}, rng, false);
    check("multi_head_attention", [&](Tape & t) { return sum(t, mul(t, multi_head_attention(t, q, kv, kv, p, 2), w)); },
          {q, kv, p.wq, p.bq, p.wk, p.bk, p.wv, p.bv, p.wo, p.bo});
  }
  {
    model::DecoderOutput out;
    out.trajectories = random_tensor({2, 3, kFutureSteps, 2}, rng);
    out.logits = random_tensor({2, 3}, rng);
    std::vector<Trajectory> targets{fixture::random_trajectory(rng, 0.3), fixture::random_trajectory(rng, 0.3)};
    check("wta_loss", [&](Tape & t) { return training::wta_loss(t, out, targets).loss; }, {out.trajectories, out.logits});
  }

  // Composite: encoder -> decoder -> WTA loss, every parameter tensor.
  for (auto [v, q] : {std::pair{model::EncoderVariant::Concat, model::QueryMode::IntentOnly},
                      std::pair{model::EncoderVariant::VisionFusion, model::QueryMode::FusedQuery}}) {
    model::MtrVpModel m(grad_model(v, q), 7);
    std::vector<Scenario> data;
    for (int i = 0; i < 3; ++i) data.push_back(fixture::random_scenario(rng, "g" + std::to_string(i), 8, 5, 6));
    data[1].intent = Intent::Left;
    data[2].intent = Intent::Right;
    std::vector<const Scenario *> ptrs{&data[0], &data[1], &data[2]};
    const auto batch = m.make_batch(ptrs);
    std::vector<Tensor> params;
    for (const auto & [name, t] : m.params().items()) params.push_back(t);
    const auto g = oracle::check_gradients(
      [&](Tape & t) { return training::wta_loss(t, m.forward(t, batch), batch.targets).loss; }, params, rng, kGradCoords);
    record(std::string("composite ") + model::to_string(v) + "/" + model::to_string(q), g);
  }

  const double secs = clock.seconds();
  return {worst <= kGradTol && secs < kGradSeconds,
          fmt("gradients: %zu checks, %zu coordinates, worst rel err %.2e (%s) <= %.0e, %.1f s < %.0f s", checks,
              coords, worst, worst_name.c_str(), kGradTol, secs, kGradSeconds)};
}

// ---------------------------------------------------------------------------
// 3. Top-k ordering on a trained model's evaluation.

Result topk_monotone()
{
  scenariogen::GenConfig g;
  g.n = 400;
  g.seed = 3003;
  g.d_vis = 16;
  g.aux_a_dim = 0;
  g.aux_b_dim = 0;
  const auto data = scenariogen::generate(g);
  training::TrainConfig c;
  c.seed = 3;
  c.epochs = 5;
  c.model.encoder.d_model = 32;
  c.model.encoder.heads = 4;
  c.model.encoder.layers = 2;
  c.model.encoder.d_vis = 16;
  c.model.decoder.d_intent = 32;
  c.model.decoder.d_attn = 64;
  c.model.decoder.heads = 4;
  c.model.decoder.num_modes = 20;
  training::Trainer t(data, c);
  t.run();
  bool ok = true;
  std::size_t violations = 0;
  for (const auto * split : {&t.train_set(), &t.val_set()}) {
    const auto preds = t.model().predict(*split);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      for (int h : {3, 5}) {
        const auto & target = (*split)[i].driven_future;
        const double a1 = metrics::ade_topk(preds[i], target, 1, h);
        const double a5 = metrics::ade_topk(preds[i], target, 5, h);
        const double a10 = metrics::ade_topk(preds[i], target, 10, h);
        if (!(a10 <= a5 && a5 <= a1)) ++violations;
      }
    }
    const auto rep = metrics::evaluate(preds, *split);
    ok &= rep.ade10_3s <= rep.ade5_3s && rep.ade5_3s <= rep.ade1_3s;
    ok &= rep.ade10_5s <= rep.ade5_5s && rep.ade5_5s <= rep.ade1_5s;
    if (split == &t.val_set()) {
      note(fmt("val ADE@3s top1/5/10 = %.4f / %.4f / %.4f", rep.ade1_3s, rep.ade5_3s, rep.ade10_3s));
      note(fmt("val ADE@5s top1/5/10 = %.4f / %.4f / %.4f", rep.ade1_5s, rep.ade5_5s, rep.ade10_5s));
    }
  }
  ok &= violations == 0;
  return {ok, fmt("top-k ordering: %zu per-sample violations (must be 0), aggregate ordering %s", violations,
                  ok ? "holds" : "BROKEN")};
}

// ---------------------------------------------------------------------------
// 4. K = 20 against K = 1 on multimodal futures.

Result multi_mode_benefit()
{
  Clock clock;
  scenariogen::GenConfig g;
  g.n = 2000;
  g.seed = 4004;
  g.mode = scenariogen::GenMode::Multimodal;
  g.d_vis = 64;
  g.aux_a_dim = 0;
  g.aux_b_dim = 0;
  const auto data = scenariogen::generate(g);

  std::vector<double> gains;
  for (std::uint64_t seed : {1, 2, 3}) {
    double ade[2];
    for (int arm = 0; arm < 2; ++arm) {
      training::TrainConfig c;
      c.seed = seed;
      c.epochs = 15;
      // Constant 1e-3 oscillates badly with 20 modes; both arms share this.
      c.adam.lr = 3e-4;
      c.lr_schedule = training::LrSchedule::Cosine;
      c.model.encoder.d_model = 64;
      c.model.encoder.d_vis = 64;
      c.ablation = arm == 0 ? training::Ablation::None : training::Ablation::SingleTrajectory;
      training::Trainer t(data, c);
      t.run();
      ade[arm] = metrics::evaluate(t.model().predict(t.val_set()), t.val_set()).ade1_5s;
    }
    gains.push_back(1.0 - ade[0] / ade[1]);
    note(fmt("seed %llu: top-1 ADE@5s K=20 %.4f, K=1 %.4f, reduction %.1f%% (%.0f s elapsed)",
             static_cast<unsigned long long>(seed), ade[0], ade[1], 100.0 * gains.back(), clock.seconds()));
  }
  std::sort(gains.begin(), gains.end());
  const double median = gains[1];
  const double secs = clock.seconds();
  return {median >= kMultiModeGain && secs < kMultiModeSeconds,
          fmt("multi-mode: median top-1 ADE@5s reduction %.1f%% >= %.0f%% over 3 seeds, %.0f s < %.0f s",
              100.0 * median, 100.0 * kMultiModeGain, secs, kMultiModeSeconds)};
}

// ---------------------------------------------------------------------------
// 5. Blank-visual harness.

training::TrainConfig vision_config(std::size_t d_vis, std::size_t epochs)
{
  training::TrainConfig c;
  c.seed = 5;
  c.epochs = epochs;
  c.model.encoder.d_model = 32;
  c.model.encoder.heads = 4;
  c.model.encoder.layers = 2;
  c.model.encoder.d_vis = d_vis;
  c.model.decoder.d_intent = 32;
  c.model.decoder.d_attn = 64;
  c.model.decoder.heads = 4;
  c.model.decoder.num_modes = 6;
  return c;
}

Result blank_visual_harness()
{
  // The full grid on ordinary data: every cell runs and reports paired deltas.
  scenariogen::GenConfig g;
  g.n = 300;
  g.seed = 5005;
  g.d_vis = 16;
  g.aux_a_dim = 8;
  g.aux_b_dim = 8;
  const auto standard = scenariogen::generate(g);
  auto base = vision_config(16, 3);
  training::fit_widths_to_data(base.model, standard);
  training::GridAxes axes;
  const auto cells = training::run_grid(standard, base, axes);
  std::size_t paired = 0;
  const auto grid = training::grid_to_json(cells);
  for (const auto & row : grid.at("rows")) paired += row.contains("delta_ade1@5s");
  const bool grid_ok = cells.size() == axes.size() && paired == axes.size() - axes.size() / 3;
  note(fmt("grid: %zu cells (expected %zu), %zu with paired deltas", cells.size(), axes.size(), paired));

  // Vision made necessary: intent is random, only the visual feature names the maneuver.
  g.n = 1500;
  g.mode = scenariogen::GenMode::VisionRequired;
  g.aux_a_dim = 0;
  g.aux_b_dim = 0;
  const auto vr = scenariogen::generate(g);
  auto full_cfg = vision_config(16, 15);
  training::GridAxes pair;
  pair.variants = {model::EncoderVariant::Concat};
  pair.queries = {model::QueryMode::IntentOnly};
  pair.ablations = {training::Ablation::None, training::Ablation::BlankVisual};
  const auto vr_cells = training::run_grid(vr, full_cfg, pair);
  const double full = vr_cells[0].report.ade1_5s, blank = vr_cells[1].report.ade1_5s;
  const double degradation = blank / full - 1.0;
  note(fmt("vision-required: ADE@5s full %.4f, blank %.4f, degradation %.1f%%", full, blank, 100.0 * degradation));

  // Same pair on ordinary data, reported for contrast only.
  g.n = 1500;
  g.mode = scenariogen::GenMode::Standard;
  const auto st = scenariogen::generate(g);
  const auto st_cells = training::run_grid(st, full_cfg, pair);
  note(fmt("standard (info): ADE@5s full %.4f, blank %.4f, change %+.1f%%", st_cells[0].report.ade1_5s,
           st_cells[1].report.ade1_5s, 100.0 * (st_cells[1].report.ade1_5s / st_cells[0].report.ade1_5s - 1.0)));

  return {grid_ok && degradation >= kVisionDegradation,
          fmt("blank visual: grid %s, vision-required degradation %.1f%% >= %.0f%%", grid_ok ? "complete" : "INCOMPLETE",
              100.0 * degradation, 100.0 * kVisionDegradation)};
}

// ---------------------------------------------------------------------------
// 6. Shapes.

Result shape_contracts()
{
  bool ok = true;
  std::vector<std::string> bad;
  auto expect = [&](bool c, const std::string & what) {
    if (!c) bad.push_back(what);
    ok &= c;
  };
  Rng rng(6006);
  for (auto v : {model::EncoderVariant::Concat, model::EncoderVariant::VisionFusion}) {
    model::ModelConfig c;
    c.encoder.d_model = 768;
    c.encoder.heads = 8;
    c.encoder.layers = 1;
    c.encoder.d_vis = kReferenceVisualDim;
    c.encoder.variant = v;
    model::MtrVpModel m(c, 1);
    std::vector<Scenario> data;
    for (int i = 0; i < 2; ++i) data.push_back(fixture::random_scenario(rng, "p" + std::to_string(i), kReferenceVisualDim));
    std::vector<const Scenario *> ptrs{&data[0], &data[1]};
    Tape tape;
    tape.set_enabled(false);
    const auto batch = m.make_batch(ptrs);
    const auto ctx = m.encoder().encode(tape, batch.states, batch.visual);
    const std::size_t tokens = v == model::EncoderVariant::Concat ? 17 : 16;
    expect(ctx.tokens.shape() == diffmath::Shape{2, tokens, 768}, std::string(model::to_string(v)) + " context");
    const auto out = m.forward(tape, batch);
    expect(out.trajectories.shape() == diffmath::Shape{2, 20, 20, 2}, "trajectories");
    expect(out.probs.shape() == diffmath::Shape{2, 20}, "probs");
    for (std::size_t b = 0; b < 2; ++b) {
      double total = 0.0;
      for (std::size_t k = 0; k < 20; ++k) total += out.probs.data()[b * 20 + k];
      expect(std::abs(total - 1.0) <= kProbSumTol, "prob sum");
    }
  }
  std::string which;
  for (const auto & b : bad) which += " " + b;
  return {ok, ok ? fmt("shapes: Concat 2x17x768, VisionFusion 2x16x768, out 2x20x20x2, |sum p - 1| <= %.0e", kProbSumTol)
                 : "shapes: wrong" + which};
}

// ---------------------------------------------------------------------------
// 7. Replay through the CLI.

std::string slurp(const std::string & p)
{
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), {});
}

Result replay_determinism(const std::string & cli, const std::string & workdir)
{
  if (cli.empty() || !fs::exists(cli)) {
    return {false, "determinism: CLI binary not given (--cli)"};
  }
  fs::remove_all(workdir);
  fs::create_directories(workdir);
  const fs::path w = workdir;
  const std::string scen = (w / "scenarios.jsonl").string(), ckpt = (w / "model.ckpt").string(),
                    rep = (w / "report.json").string();
  auto sh = [&](const std::string & args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + (w / "cli.log").string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string small =
    " --d-model 16 --heads 4 --layers 1 --d-intent 16 --d-attn 32 --attn-heads 4 --k 5 --epochs 2 --batch 16";
  if (sh("generate --out \"" + scen + "\" --n 150 --seed 7 --d-vis 16 --aux-a 4 --aux-b 4") != 0 ||
      sh("train --scenarios \"" + scen + "\" --out \"" + ckpt + "\" --seed 7" + small) != 0 ||
      sh("eval --scenarios \"" + scen + "\" --checkpoint \"" + ckpt + "\" --out \"" + rep + "\"") != 0) {
    return {false, "determinism: a CLI command failed, see " + (w / "cli.log").string()};
  }
  const std::vector<std::string> files{scen, ckpt, ckpt + ".csv", rep};
  std::vector<std::string> before;
  for (const auto & f : files) before.push_back(slurp(f));
  for (const auto & f : files) fs::remove(f);
  // Replay in pipeline order: each step re-creates the next step's input.
  for (const auto & m : {scen, ckpt, rep}) {
    if (sh("replay --manifest \"" + m + ".manifest.json\"") != 0) {
      return {false, "determinism: replay of " + m + " failed or differed"};
    }
  }
  std::size_t same = 0;
  for (std::size_t i = 0; i < files.size(); ++i) same += slurp(files[i]) == before[i] && !before[i].empty();
  return {same == files.size(), fmt("determinism: %zu/%zu replayed outputs byte-identical (scenarios, checkpoint, "
                                    "epoch log, report)", same, files.size())};
}

// ---------------------------------------------------------------------------
// 8. WTA gradient locality.

Result wta_locality()
{
  Rng rng(8008);
  std::size_t cases = 0, nonzero = 0, dead_winners = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t b = 1 + rng.below(4), k = 2 + rng.below(19);
    model::DecoderOutput out;
    out.trajectories = oracle::random_tensor({b, k, kFutureSteps, 2}, rng);
    for (auto & v : out.trajectories.data()) v *= 10.0;
    out.logits = oracle::random_tensor({b, k}, rng);
    std::vector<Trajectory> targets;
    for (std::size_t i = 0; i < b; ++i) targets.push_back(fixture::random_trajectory(rng, 1.0));
    Tape tape;
    auto loss = training::wta_loss(tape, out, targets);
    tape.backward(loss.loss);
    const auto g = std::as_const(out.trajectories).grad();
    for (std::size_t s = 0; s < b; ++s) {
      for (std::size_t m = 0; m < k; ++m) {
        bool any = false;
        for (std::size_t j = 0; j < kFutureSteps * 2; ++j) any |= g[(s * k + m) * kFutureSteps * 2 + j] != 0.0;
        if (m == loss.closest[s]) {
          dead_winners += !any;
        } else {
          nonzero += any;
        }
      }
    }
    ++cases;
  }
  return {nonzero == 0 && dead_winners == 0,
          fmt("wta locality: %zu random batches, %zu non-closest modes with non-zero gradient (must be 0)", cases,
              nonzero)};
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"mtrvp acceptance run"};
  std::string cli, workdir = (fs::temp_directory_path() / "mtrvp_acceptance").string();
  std::vector<int> only;
  app.add_option("--cli", cli, "Path to the mtrvp binary");
  app.add_option("--workdir", workdir, "Scratch directory for the CLI replay");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char *, std::function<Result()>>> criteria{
    {"metric oracle", metric_oracle},
    {"gradient integrity", gradient_integrity},
    {"top-k monotonicity", topk_monotone},
    {"multi-mode benefit", multi_mode_benefit},
    {"blank-visual harness", blank_visual_harness},
    {"shape contracts", shape_contracts},
    {"replay determinism", [&] { return replay_determinism(cli, workdir); }},
    {"wta locality", wta_locality}};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    std::printf("criterion %d (%s) ...\n", id, criteria[i].first);
    std::fflush(stdout);
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception & e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    failures += !r.pass;
    std::printf("[%s] %d: %s\n", r.pass ? "PASS" : "FAIL", id, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASS" : fmt("%d CRITERIA FAILED", failures).c_str());
  return failures == 0 ? 0 : 1;
}
