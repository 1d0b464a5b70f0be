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

// mtrvp: generate -> train -> eval -> ablate -> report, plus manifest replay.
//
// Exit codes: 0 ok, 2 bad flags, 3 bad input files, 4 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "mtrvp/mtrvp.hpp"
#include "svg.hpp"

namespace
{

using namespace mtrvp;
namespace fs = std::filesystem;

constexpr int kExitFlags = 2;
constexpr int kExitInput = 3;
constexpr int kExitRuntime = 4;

struct FlagError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::vector<Scenario> load_scenarios(const std::string & path)
{
  if (!fs::is_regular_file(path)) {
    throw InputError("scenario file '" + path + "' does not exist");
  }
  try {
    auto data = read_scenarios(path);
    if (data.empty()) {
      throw InputError("scenario file '" + path + "' is empty");
    }
    return data;
  } catch (const InputError &) {
    throw;
  } catch (const std::exception & e) {
    throw InputError(e.what());
  }
}

training::Checkpoint load_checkpoint(const std::string & path)
{
  try {
    return training::read_checkpoint(path);
  } catch (const std::exception & e) {
    throw InputError(e.what());
  }
}

std::string default_path(const std::string & given, const std::string & base, const std::string & suffix)
{
  return given.empty() ? base + suffix : given;
}

// ---------------------------------------------------------------------------
// Options shared by train and ablate.

struct ModelFlags
{
  std::string variant{"concat"};
  std::string ablation{"none"};
  std::string query{"intent_only"};
  std::size_t k{20};
  std::size_t d_model{64};
  std::size_t heads{8};
  std::size_t layers{4};
  std::size_t d_intent{128};
  std::size_t d_attn{512};
  std::size_t attn_heads{8};
  std::size_t epochs{30};
  double lr{1e-3};
  std::string lr_schedule{"constant"};
  std::size_t batch{32};
  double grad_clip{0.0};
  double lambda{1.0};
  std::uint64_t seed{0};
  bool zero_visual_projection{false};

  void add(CLI::App * app, bool grid)
  {
    app->add_option("--seed", seed, "Split, init and shuffle seed");
    if (!grid) {
      app->add_option("--variant", variant, "Encoder variant")->check(CLI::IsMember({"concat", "vision_fusion"}));
      app->add_option("--ablation", ablation, "Ablation")
        ->check(CLI::IsMember({"none", "full", "blank_visual", "single_trajectory"}));
      app->add_option("--query", query, "Decoder query")->check(CLI::IsMember({"intent_only", "fused_query"}));
      app->add_flag("--zero-visual-projection", zero_visual_projection, "Zero and freeze the visual projection");
    }
    app->add_option("--k", k, "Number of modes")->check(CLI::PositiveNumber);
    app->add_option("--d-model", d_model, "Encoder width")->check(CLI::PositiveNumber);
    app->add_option("--heads", heads, "Encoder attention heads")->check(CLI::PositiveNumber);
    app->add_option("--layers", layers, "Encoder blocks");
    app->add_option("--d-intent", d_intent, "Intent embedding width")->check(CLI::PositiveNumber);
    app->add_option("--d-attn", d_attn, "Cross-attention width")->check(CLI::PositiveNumber);
    app->add_option("--attn-heads", attn_heads, "Cross-attention heads")->check(CLI::PositiveNumber);
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--lr", lr, "Adam learning rate")->check(CLI::PositiveNumber);
    app->add_option("--lr-schedule", lr_schedule, "Learning-rate schedule")
      ->check(CLI::IsMember({"constant", "cosine"}));
    app->add_option("--batch", batch, "Minibatch size")->check(CLI::PositiveNumber);
    app->add_option("--grad-clip", grad_clip, "Global gradient-norm clip (0 = off)")->check(CLI::NonNegativeNumber);
    app->add_option("--lambda", lambda, "Regression weight")->check(CLI::NonNegativeNumber);
  }

  training::TrainConfig build(const std::vector<Scenario> & data) const
  {
    training::TrainConfig c;
    c.seed = seed;
    c.epochs = epochs;
    c.batch_size = batch;
    c.adam.lr = lr;
    c.adam.grad_clip = grad_clip;
    c.lr_schedule = training::lr_schedule_from_string(lr_schedule);
    c.lambda = lambda;
    c.zero_visual_projection = zero_visual_projection;
    c.ablation = training::ablation_from_string(ablation);
    c.model.encoder.variant = training::variant_from_string(variant);
    c.model.encoder.d_model = d_model;
    c.model.encoder.heads = heads;
    c.model.encoder.layers = layers;
    c.model.decoder.query_mode = training::query_mode_from_string(query);
    c.model.decoder.num_modes = k;
    c.model.decoder.d_intent = d_intent;
    c.model.decoder.d_attn = d_attn;
    c.model.decoder.heads = attn_heads;
    training::fit_widths_to_data(c.model, data);
    try {
      c.validate();
    } catch (const std::exception & e) {
      throw FlagError(e.what());
    }
    return c;
  }
};

void print_epoch(const training::EpochRecord & r)
{
  std::printf(
    "epoch %3zu  loss %.5f  val ADE@3s %.4f  ADE@5s %.4f  top5@5s %.4f\n", r.epoch, r.train_loss, r.val_ade1_3s,
    r.val_ade1_5s, r.val_ade5_5s);
  std::fflush(stdout);
}

std::vector<double> column(const std::vector<std::vector<double>> & rows, std::size_t c)
{
  std::vector<double> out;
  for (const auto & r : rows) out.push_back(r.at(c));
  return out;
}

std::vector<std::vector<double>> read_epoch_csv(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open epoch log '" + path + "'");
  }
  std::string line;
  std::getline(in, line);
  if (line != training::kEpochCsvHeader) {
    throw InputError("'" + path + "' is not an epoch log");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception &) {
        throw InputError("'" + path + "': bad number '" + cell + "'");
      }
    }
    if (row.size() != 8) {
      throw InputError("'" + path + "': expected 8 columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> xs(const Trajectory & t, bool with_origin = true)
{
  std::vector<double> v;
  if (with_origin) v.push_back(0.0);
  for (const auto & w : t.waypoints) v.push_back(w.x);
  return v;
}

std::vector<double> ys(const Trajectory & t, bool with_origin = true)
{
  std::vector<double> v;
  if (with_origin) v.push_back(0.0);
  for (const auto & w : t.waypoints) v.push_back(w.y);
  return v;
}

// Top-down view: history, raters, predicted modes (opacity by probability), driven future.
std::string bev_svg(const Scenario & s, const PredictionSet & p)
{
  std::vector<cli::Series> series;
  cli::Series hist{"history", "#555", {}, {}};
  for (const auto & e : s.history.steps) hist.x.push_back(e.x), hist.y.push_back(e.y);
  hist.markers = true;
  series.push_back(hist);
  const char * rater_colors[] = {"#2ca02c", "#bcbd22", "#d62728"};
  for (std::size_t r = 0; r < s.raters.size(); ++r) {
    char label[48];
    std::snprintf(label, sizeof(label), "rater %zu (%.1f)", r, s.raters[r].score);
    cli::Series rs{label, rater_colors[r % 3], xs(s.raters[r].trajectory), ys(s.raters[r].trajectory)};
    rs.dashed = true;
    series.push_back(rs);
  }
  const auto order = model::rank_modes(p.probs);
  const double pmax = p.probs[order.front()];
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto m = order[i];
    cli::Series ms{i == 0 ? "top-1 mode" : (i == 1 ? "other modes" : ""), i == 0 ? "#1f77b4" : "#9467bd",
                   xs(p.modes[m]), ys(p.modes[m])};
    ms.opacity = i == 0 ? 1.0 : std::max(0.15, p.probs[m] / pmax);
    ms.width = i == 0 ? 2.5 : 1.0;
    series.push_back(ms);
  }
  cli::Series driven{"driven future", "#000", xs(s.driven_future), ys(s.driven_future)};
  driven.width = 2.0;
  driven.markers = true;
  series.push_back(driven);
  cli::PlotSpec spec{s.id + "  [" + s.category + ", intent " + intent_name(s.intent) + "]", "x (m)", "y (m)", true,
                     720, 540};
  return cli::render_svg(spec, series);
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string> & args);

int dispatch(CLI::App & app, const std::vector<std::string> & args)
{
  // generate
  auto * gen = app.add_subcommand("generate", "Write a synthetic scenario file");
  std::string g_out, g_mode{"standard"};
  std::size_t g_n{1000}, g_dvis{64}, g_aux_a{32}, g_aux_b{48};
  std::uint64_t g_seed{0};
  double g_major{0.7}, g_visual_noise{0.3}, g_noise_pos{0.02}, g_noise_vel{0.05};
  std::vector<std::pair<std::string, double>> g_mix;
  gen->add_option("--out", g_out, "Output JSON-lines file")->required();
  gen->add_option("--n", g_n, "Number of scenarios");
  gen->add_option("--seed", g_seed, "Generator seed");
  gen->add_option("--mode", g_mode, "Generator mode")
    ->check(CLI::IsMember({"standard", "multimodal", "vision_required"}));
  gen->add_option("--d-vis", g_dvis, "Visual embedding width")->check(CLI::PositiveNumber);
  gen->add_option("--aux-a", g_aux_a, "Auxiliary embedding A width (0 = omit)");
  gen->add_option("--aux-b", g_aux_b, "Auxiliary embedding B width (0 = omit)");
  gen->add_option("--major-prob", g_major, "Multimodal: keep-speed branch probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--visual-noise", g_visual_noise, "Visual feature noise std")->check(CLI::NonNegativeNumber);
  gen->add_option("--noise-pos", g_noise_pos, "History position noise std (m)")->check(CLI::NonNegativeNumber);
  gen->add_option("--noise-vel", g_noise_vel, "History speed noise std (m/s)")->check(CLI::NonNegativeNumber);
  gen->add_option("--mix", g_mix, "Category weight, repeatable: --mix stop 2");

  // train
  auto * tr = app.add_subcommand("train", "Train a model and write a checkpoint");
  std::string t_scen, t_out, t_log, t_resume;
  ModelFlags t_flags;
  tr->add_option("--scenarios", t_scen, "Scenario file")->required();
  tr->add_option("--out", t_out, "Checkpoint path")->required();
  tr->add_option("--log", t_log, "Epoch CSV (default <out>.csv)");
  tr->add_option("--resume", t_resume, "Continue from this checkpoint");
  t_flags.add(tr, false);

  // eval
  auto * ev = app.add_subcommand("eval", "Score a checkpoint (or the driven futures) on a scenario file");
  std::string e_scen, e_ckpt, e_out;
  bool e_driven = false;
  ev->add_option("--scenarios", e_scen, "Scenario file")->required();
  ev->add_option("--checkpoint", e_ckpt, "Checkpoint");
  ev->add_option("--out", e_out, "Report JSON")->required();
  ev->add_flag("--driven-as-prediction", e_driven, "Score each driven future as a single certain mode");

  // ablate
  auto * ab = app.add_subcommand("ablate", "Train and score the variant grid under one seed");
  std::string a_scen, a_out, a_table;
  ModelFlags a_flags;
  std::vector<std::string> a_variants{"concat", "vision_fusion"};
  std::vector<std::string> a_ablations{"none", "blank_visual", "single_trajectory"};
  std::vector<std::string> a_queries{"intent_only", "fused_query"};
  ab->add_option("--scenarios", a_scen, "Scenario file")->required();
  ab->add_option("--out", a_out, "Grid JSON")->required();
  ab->add_option("--table", a_table, "Aligned table (default <out>.txt)");
  ab->add_option("--variants", a_variants, "Encoder variants")->check(CLI::IsMember({"concat", "vision_fusion"}));
  ab->add_option("--ablations", a_ablations, "Ablations")
    ->check(CLI::IsMember({"none", "blank_visual", "single_trajectory"}));
  ab->add_option("--queries", a_queries, "Query modes")->check(CLI::IsMember({"intent_only", "fused_query"}));
  a_flags.add(ab, true);

  // report
  auto * rp = app.add_subcommand("report", "Render loss curves and top-down trajectory plots");
  std::string r_out, r_scen, r_ckpt;
  std::vector<std::string> r_logs;
  std::size_t r_samples{4};
  rp->add_option("--out", r_out, "Output directory")->required();
  rp->add_option("--log", r_logs, "Epoch CSV, repeatable");
  rp->add_option("--scenarios", r_scen, "Scenario file for overlays");
  rp->add_option("--checkpoint", r_ckpt, "Checkpoint for overlays");
  rp->add_option("--samples", r_samples, "Scenarios to plot");

  // replay
  auto * rl = app.add_subcommand("replay", "Re-run a command from its manifest and verify its outputs");
  std::string m_path;
  rl->add_option("--manifest", m_path, "Manifest written by an earlier run")->required();

  std::vector<const char *> argv;
  for (const auto & a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFlags;
  }

  cli::RunManifest m;
  std::string manifest_path;
  std::vector<std::string> inputs, outputs;
  const std::string flags = app.config_to_str(false, false);

  if (gen->parsed()) {
    scenariogen::GenConfig g;
    g.n = g_n;
    g.seed = g_seed;
    g.mode = scenariogen::gen_mode_from_string(g_mode);
    g.d_vis = g_dvis;
    g.aux_a_dim = g_aux_a;
    g.aux_b_dim = g_aux_b;
    g.major_branch_prob = g_major;
    g.visual_noise = g_visual_noise;
    g.noise_pos = g_noise_pos;
    g.noise_vel = g_noise_vel;
    for (const auto & [k, w] : g_mix) g.category_mix[k] = w;
    try {
      g.validate();
    } catch (const std::exception & e) {
      throw FlagError(e.what());
    }
    write_scenarios(g_out, scenariogen::generate(g));
    std::printf("wrote %zu scenarios to %s\n", g.n, g_out.c_str());
    m.command = "generate";
    m.seed = g_seed;
    m.config = {{"n", g.n}, {"seed", g.seed}, {"mode", g_mode}, {"d_vis", g.d_vis}, {"aux_a", g.aux_a_dim},
                {"aux_b", g.aux_b_dim}, {"mix", g.effective_mix()}};
    outputs = {g_out};
    manifest_path = g_out + ".manifest.json";
  } else if (tr->parsed()) {
    const auto data = load_scenarios(t_scen);
    inputs = {t_scen};
    std::unique_ptr<training::Trainer> trainer;
    if (!t_resume.empty()) {
      auto ckpt = load_checkpoint(t_resume);
      if (tr->count("--epochs")) ckpt.config.epochs = t_flags.epochs;
      inputs.push_back(t_resume);
      trainer = std::make_unique<training::Trainer>(data, ckpt);
    } else {
      trainer = std::make_unique<training::Trainer>(data, t_flags.build(data));
    }
    trainer->run(print_epoch);
    t_log = default_path(t_log, t_out, ".csv");
    training::write_checkpoint(t_out, trainer->checkpoint());
    training::write_epoch_log(t_log, trainer->log());
    std::printf("wrote %s and %s\n", t_out.c_str(), t_log.c_str());
    m.command = "train";
    m.seed = trainer->config().seed;
    m.config = training::to_json(trainer->config());
    outputs = {t_out, t_log};
    manifest_path = t_out + ".manifest.json";
  } else if (ev->parsed()) {
    if (e_driven == !e_ckpt.empty()) {
      throw FlagError("eval needs exactly one of --checkpoint or --driven-as-prediction");
    }
    const auto data = load_scenarios(e_scen);
    inputs = {e_scen};
    std::vector<PredictionSet> preds;
    nlohmann::json cfg;
    if (e_driven) {
      for (const auto & s : data) preds.push_back({{s.driven_future}, {1.0}});
      cfg = {{"predictions", "driven_future"}};
    } else {
      const auto ckpt = load_checkpoint(e_ckpt);
      inputs.push_back(e_ckpt);
      const auto model = training::restore_model(ckpt);
      try {
        preds = model.predict(data);
      } catch (const std::invalid_argument & e) {
        throw InputError(std::string("scenarios do not fit the checkpoint: ") + e.what());
      }
      cfg = training::to_json(ckpt.config);
    }
    const auto rep = metrics::evaluate(preds, data);
    cli::write_text(e_out, nlohmann::json{{"report", metrics::to_json(rep)}}.dump(2) + "\n");
    std::printf("%s", metrics::format_table(rep).c_str());
    m.command = "eval";
    m.config = cfg;
    outputs = {e_out};
    manifest_path = e_out + ".manifest.json";
  } else if (ab->parsed()) {
    const auto data = load_scenarios(a_scen);
    inputs = {a_scen};
    const auto base = a_flags.build(data);
    training::GridAxes axes;
    axes.variants.clear();
    axes.ablations.clear();
    axes.queries.clear();
    for (const auto & v : a_variants) axes.variants.push_back(training::variant_from_string(v));
    for (const auto & v : a_ablations) axes.ablations.push_back(training::ablation_from_string(v));
    for (const auto & v : a_queries) axes.queries.push_back(training::query_mode_from_string(v));
    const auto cells = training::run_grid(data, base, axes, [](const training::GridCell & c) {
      std::printf(
        "cell %-14s %-12s %-18s ADE@5s %.4f  RFS %.4f\n", model::to_string(c.variant), model::to_string(c.query),
        training::to_string(c.ablation), c.report.ade1_5s, c.report.rfs.overall);
      std::fflush(stdout);
    });
    a_table = default_path(a_table, a_out, ".txt");
    const std::string table = training::grid_table(cells);
    cli::write_text(a_out, training::grid_to_json(cells).dump(2) + "\n");
    cli::write_text(a_table, table);
    std::printf("\n%s", table.c_str());
    m.command = "ablate";
    m.seed = base.seed;
    m.config = training::to_json(base);
    outputs = {a_out, a_table};
    manifest_path = a_out + ".manifest.json";
  } else if (rp->parsed()) {
    fs::create_directories(r_out);
    std::size_t idx = 0;
    for (const auto & log : r_logs) {
      const auto rows = read_epoch_csv(log);
      inputs.push_back(log);
      const auto epochs = column(rows, 0);
      const std::string stem = fs::path(log).stem().string();
      const std::string loss_path = (fs::path(r_out) / (stem + "_loss.svg")).string();
      cli::write_text(loss_path, cli::render_svg({stem + ": training loss", "epoch", "WTA loss"},
                                                 {{"train loss", "#1f77b4", epochs, column(rows, 1), 2.0, 1.0, false, true}}));
      const std::string ade_path = (fs::path(r_out) / (stem + "_val_ade.svg")).string();
      cli::write_text(
        ade_path, cli::render_svg(
                    {stem + ": validation ADE", "epoch", "ADE (m)"},
                    {{"top-1 @3s", "#1f77b4", epochs, column(rows, 2), 1.5, 1.0, true, false},
                     {"top-1 @5s", "#1f77b4", epochs, column(rows, 3), 2.0, 1.0, false, true},
                     {"top-5 @5s", "#ff7f0e", epochs, column(rows, 5), 2.0, 1.0, false, true},
                     {"top-10 @5s", "#2ca02c", epochs, column(rows, 7), 2.0, 1.0, false, true}}));
      outputs.push_back(loss_path);
      outputs.push_back(ade_path);
      ++idx;
    }
    if (!r_scen.empty() || !r_ckpt.empty()) {
      if (r_scen.empty() || r_ckpt.empty()) {
        throw FlagError("overlays need both --scenarios and --checkpoint");
      }
      const auto data = load_scenarios(r_scen);
      const auto ckpt = load_checkpoint(r_ckpt);
      inputs.push_back(r_scen);
      inputs.push_back(r_ckpt);
      const std::vector<Scenario> subset(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(std::min(r_samples, data.size())));
      const auto preds = training::restore_model(ckpt).predict(subset);
      for (std::size_t i = 0; i < subset.size(); ++i) {
        const std::string path = (fs::path(r_out) / ("bev_" + subset[i].id + ".svg")).string();
        cli::write_text(path, bev_svg(subset[i], preds[i]));
        outputs.push_back(path);
      }
      const auto rep = metrics::evaluate(preds, subset);
      const std::string table_path = (fs::path(r_out) / "overlay_metrics.txt").string();
      cli::write_text(table_path, metrics::format_table(rep));
      outputs.push_back(table_path);
    }
    if (outputs.empty()) {
      throw FlagError("report needs --log and/or --scenarios with --checkpoint");
    }
    for (const auto & o : outputs) std::printf("wrote %s\n", o.c_str());
    m.command = "report";
    manifest_path = (fs::path(r_out) / "report.manifest.json").string();
  } else if (rl->parsed()) {
    cli::RunManifest old;
    try {
      old = cli::read_manifest(m_path);
    } catch (const std::exception & e) {
      throw InputError(e.what());
    }
    if (old.version != cli::kToolVersion) {
      throw InputError("manifest written by mtrvp " + old.version + ", this is " + cli::kToolVersion);
    }
    for (const auto & f : old.inputs) {
      if (!fs::is_regular_file(f.path) || cli::sha256_file(f.path) != f.sha256) {
        throw InputError("input '" + f.path + "' is missing or changed since the manifest was written");
      }
    }
    const std::string cfg = m_path + ".replay.toml";
    cli::write_text(cfg, old.flags);
    const int code = run({"mtrvp", "--config", cfg, old.command});
    fs::remove(cfg);
    if (code != 0) return code;
    bool same = true;
    for (const auto & f : old.outputs) {
      const std::string now = cli::sha256_file(f.path);
      const bool ok = now == f.sha256;
      same = same && ok;
      std::printf("%s %s %s\n", ok ? "identical" : "DIFFERS  ", now.c_str(), f.path.c_str());
    }
    return same ? 0 : kExitRuntime;
  } else {
    std::cerr << app.help();
    return kExitFlags;
  }

  m.flags = flags;
  m.inputs = cli::digest_all(inputs);
  m.outputs = cli::digest_all(outputs);
  cli::write_manifest(manifest_path, m);
  std::printf("manifest %s\n", manifest_path.c_str());
  return 0;
}

int run(const std::vector<std::string> & args)
{
  CLI::App app{"MTR-VP trajectory planning toolkit", "mtrvp"};
  app.set_config("--config", "", "TOML file of flag values; explicit flags win");
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", cli::kToolVersion);
  try {
    return dispatch(app, args);
  } catch (const FlagError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFlags;
  } catch (const InputError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const training::CheckpointError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char ** argv)
{
  return run(std::vector<std::string>(argv, argv + argc));
}
