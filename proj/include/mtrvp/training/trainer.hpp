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

#ifndef MTRVP__TRAINING__TRAINER_HPP_
#define MTRVP__TRAINING__TRAINER_HPP_

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtrvp/metrics/report.hpp"
#include "mtrvp/model/model.hpp"
#include "mtrvp/training/adam.hpp"
#include "mtrvp/training/checkpoint.hpp"
#include "mtrvp/training/config.hpp"
#include "mtrvp/training/split.hpp"
#include "mtrvp/training/wta_loss.hpp"

namespace mtrvp::training
{

class TrainingDiverged : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct EpochRecord
{
  std::size_t epoch{0};
  double train_loss{0.0};
  double val_ade1_3s{0.0};
  double val_ade1_5s{0.0};
  double val_ade5_3s{0.0};
  double val_ade5_5s{0.0};
  double val_ade10_3s{0.0};
  double val_ade10_5s{0.0};
};

inline constexpr const char * kEpochCsvHeader =
  "epoch,train_loss,val_ade1_3s,val_ade1_5s,val_ade5_3s,val_ade5_5s,val_ade10_3s,val_ade10_5s";

inline std::string to_csv_row(const EpochRecord & r)
{
  char buf[256];
  std::snprintf(
    buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.epoch, r.train_loss, r.val_ade1_3s,
    r.val_ade1_5s, r.val_ade5_3s, r.val_ade5_5s, r.val_ade10_3s, r.val_ade10_5s);
  return buf;
}

inline void write_epoch_log(const std::string & path, const std::vector<EpochRecord> & log)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << kEpochCsvHeader << '\n';
  for (const auto & r : log) {
    out << to_csv_row(r) << '\n';
  }
}

/// BlankVisual: every visual vector is zeroed when the data is loaded.
inline void blank_visuals(std::vector<Scenario> & data)
{
  for (auto & s : data) {
    std::fill(s.visual.embedding.begin(), s.visual.embedding.end(), 0.0);
    if (s.visual.aux_a) std::fill(s.visual.aux_a->begin(), s.visual.aux_a->end(), 0.0);
    if (s.visual.aux_b) std::fill(s.visual.aux_b->begin(), s.visual.aux_b->end(), 0.0);
  }
}

inline constexpr const char * kVisualProjectionWeight = "encoder.visual_proj.w";

/**
 * @brief Minibatch WTA training with Adam over a seeded 80/20 split.
 *
 * The whole run is a function of (dataset, config): the split, the model
 * initialisation and each epoch's shuffle all derive from `config.seed`.
 * Resuming from a checkpoint taken after epoch e with the same dataset
 * continues exactly as the uninterrupted run would have.
 */
class Trainer
{
public:
  Trainer(const std::vector<Scenario> & dataset, const TrainConfig & cfg) : cfg_(cfg), rng_(cfg.seed, 0x747261696eULL)
  {
    cfg_.validate();
    prepare(dataset);
    model_ = std::make_unique<model::MtrVpModel>(cfg_.effective_model(), cfg_.seed);
    model_->set_normalization(model::Normalization::fit(train_, cfg_.model.decoder.cumulative));
    if (cfg_.zero_visual_projection) {
      auto w = model_->params().get(kVisualProjectionWeight);
      std::fill(w.data().begin(), w.data().end(), 0.0);
      frozen_.insert(kVisualProjectionWeight);
    }
  }

  /// Resumes from a checkpoint; `dataset` must be the one the run started with.
  Trainer(const std::vector<Scenario> & dataset, const Checkpoint & ckpt)
  : cfg_(ckpt.config), rng_(Rng::restore(ckpt.rng_key, ckpt.rng_counter)), epoch_(ckpt.epoch)
  {
    cfg_.validate();
    prepare(dataset);
    model_ = std::make_unique<model::MtrVpModel>(restore_model(ckpt));
    adam_ = restore_adam(ckpt, model_->params());
    if (cfg_.zero_visual_projection) {
      frozen_.insert(kVisualProjectionWeight);
    }
  }

  const TrainConfig & config() const { return cfg_; }
  const model::MtrVpModel & model() const { return *model_; }
  const std::vector<Scenario> & train_set() const { return train_; }
  const std::vector<Scenario> & val_set() const { return val_; }
  const std::vector<EpochRecord> & log() const { return log_; }
  std::size_t epoch() const { return epoch_; }
  bool done() const { return epoch_ >= cfg_.epochs; }

  /// Mean WTA loss over the training split with the current parameters.
  double dataset_loss() const
  {
    double total = 0.0;
    for (std::size_t start = 0; start < train_.size(); start += cfg_.batch_size) {
      std::vector<const Scenario *> ptrs;
      for (std::size_t i = start; i < std::min(train_.size(), start + cfg_.batch_size); ++i) {
        ptrs.push_back(&train_[i]);
      }
      diffmath::Tape tape;
      tape.set_enabled(false);
      const auto batch = model_->make_batch(ptrs);
      const auto out = model_->forward(tape, batch);
      total += wta_loss(tape, out, batch.targets, cfg_.lambda).loss.item() * static_cast<double>(ptrs.size());
    }
    return total / static_cast<double>(train_.size());
  }

  /// One optimisation step on the given samples; returns the batch loss.
  double step(const std::vector<const Scenario *> & samples)
  {
    diffmath::Tape tape;
    const auto batch = model_->make_batch(samples);
    const auto out = model_->forward(tape, batch);
    auto loss = wta_loss(tape, out, batch.targets, cfg_.lambda);
    const double value = loss.loss.item();
    if (!std::isfinite(value)) {
      throw TrainingDiverged(
        "non-finite training loss at epoch " + std::to_string(epoch_ + 1) + ", adam step " +
        std::to_string(adam_.step + 1));
    }
    model_->params().zero_grad();
    tape.backward(loss.loss);
    AdamConfig adam = cfg_.adam;
    adam.lr = scheduled_lr(cfg_, adam_.step, cfg_.epochs * steps_per_epoch());
    adam_step(model_->params(), adam_, adam, frozen_);
    return value;
  }

  std::size_t steps_per_epoch() const { return (train_.size() + cfg_.batch_size - 1) / cfg_.batch_size; }

  const EpochRecord & run_epoch()
  {
    std::vector<std::size_t> order(train_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = rng_.split(epoch_);
    shuffle.shuffle(order);

    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg_.batch_size) {
      std::vector<const Scenario *> ptrs;
      for (std::size_t i = start; i < std::min(order.size(), start + cfg_.batch_size); ++i) {
        ptrs.push_back(&train_[order[i]]);
      }
      total += step(ptrs) * static_cast<double>(ptrs.size());
    }
    model_->params().zero_grad();
    ++epoch_;

    EpochRecord r;
    r.epoch = epoch_;
    r.train_loss = total / static_cast<double>(train_.size());
    const auto rep = metrics::evaluate(model_->predict(val_), val_);
    r.val_ade1_3s = rep.ade1_3s;
    r.val_ade1_5s = rep.ade1_5s;
    r.val_ade5_3s = rep.ade5_3s;
    r.val_ade5_5s = rep.ade5_5s;
    r.val_ade10_3s = rep.ade10_3s;
    r.val_ade10_5s = rep.ade10_5s;
    log_.push_back(r);
    return log_.back();
  }

  /// Trains up to `config.epochs`, calling `on_epoch` after each epoch.
  void run(const std::function<void(const EpochRecord &)> & on_epoch = {})
  {
    while (!done()) {
      const auto & r = run_epoch();
      if (on_epoch) on_epoch(r);
    }
  }

  Checkpoint checkpoint() const { return capture_checkpoint(cfg_, *model_, adam_, epoch_, rng_); }

private:
  void prepare(const std::vector<Scenario> & dataset)
  {
    if (dataset.size() < 2) {
      throw InvariantError("training needs at least 2 scenarios, got " + std::to_string(dataset.size()));
    }
    auto [train, val] = split_dataset(dataset, cfg_.train_ratio, cfg_.seed);
    train_ = std::move(train);
    val_ = std::move(val);
    if (cfg_.ablation == Ablation::BlankVisual) {
      blank_visuals(train_);
      blank_visuals(val_);
    }
  }

  TrainConfig cfg_;
  Rng rng_;
  std::size_t epoch_{0};
  std::vector<Scenario> train_;
  std::vector<Scenario> val_;
  std::unique_ptr<model::MtrVpModel> model_;
  AdamState adam_;
  std::set<std::string> frozen_;
  std::vector<EpochRecord> log_;
};

struct TrainResult
{
  Checkpoint checkpoint;
  std::vector<EpochRecord> log;
  double initial_loss{0.0};
};

/// Full run from scratch.
inline TrainResult train(
  const std::vector<Scenario> & dataset, const TrainConfig & cfg,
  const std::function<void(const EpochRecord &)> & on_epoch = {})
{
  Trainer t(dataset, cfg);
  TrainResult r;
  r.initial_loss = t.dataset_loss();
  t.run(on_epoch);
  r.checkpoint = t.checkpoint();
  r.log = t.log();
  return r;
}

}  // namespace mtrvp::training

#endif  // MTRVP__TRAINING__TRAINER_HPP_
