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

// Checkpoint container:
//
//   "MTRVPCK1" | u64 header length (LE) | JSON header | float64 LE payload
//
// The header holds the training config, normalisation constants, epoch and
// RNG state, and an index of named arrays (name, shape, offset in doubles)
// into the payload. Arrays are model parameters followed by the Adam moment
// buffers "adam.m/<name>" and "adam.v/<name>".

#ifndef MTRVP__TRAINING__CHECKPOINT_HPP_
#define MTRVP__TRAINING__CHECKPOINT_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtrvp/model/model.hpp"
#include "mtrvp/training/adam.hpp"
#include "mtrvp/training/config.hpp"

namespace mtrvp::training
{

static_assert(std::endian::native == std::endian::little, "checkpoint payload assumes a little-endian host");

inline constexpr char kCheckpointMagic[8] = {'M', 'T', 'R', 'V', 'P', 'C', 'K', '1'};

struct NamedArray
{
  std::string name;
  diffmath::Shape shape;
  std::vector<double> data;
};

struct Checkpoint
{
  TrainConfig config;
  model::Normalization normalization;
  std::size_t epoch{0};
  std::size_t adam_step{0};
  std::uint64_t rng_key{0};
  std::uint64_t rng_counter{0};
  std::vector<NamedArray> arrays;

  const NamedArray * find(const std::string & name) const
  {
    for (const auto & a : arrays) {
      if (a.name == name) return &a;
    }
    return nullptr;
  }
};

class CheckpointError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline Checkpoint capture_checkpoint(
  const TrainConfig & cfg, const model::MtrVpModel & m, const AdamState & adam, std::size_t epoch,
  const Rng & rng)
{
  Checkpoint c;
  c.config = cfg;
  c.normalization = m.normalization();
  c.epoch = epoch;
  c.adam_step = adam.step;
  c.rng_key = rng.key();
  c.rng_counter = rng.counter();
  const auto & items = m.params().items();
  for (const auto & [name, t] : items) {
    c.arrays.push_back({name, t.shape(), {t.data().begin(), t.data().end()}});
  }
  if (!adam.m.empty()) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      c.arrays.push_back({"adam.m/" + items[i].first, items[i].second.shape(), adam.m[i]});
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      c.arrays.push_back({"adam.v/" + items[i].first, items[i].second.shape(), adam.v[i]});
    }
  }
  return c;
}

/// Rebuilds the model described by the checkpoint and loads its parameters.
inline model::MtrVpModel restore_model(const Checkpoint & c)
{
  model::MtrVpModel m(c.config.effective_model(), c.config.seed);
  m.set_normalization(c.normalization);
  for (const auto & [name, t0] : m.params().items()) {
    const NamedArray * a = c.find(name);
    if (!a) {
      throw CheckpointError("checkpoint lacks parameter '" + name + "'");
    }
    auto t = t0;
    if (a->shape != t.shape()) {
      throw CheckpointError("checkpoint parameter '" + name + "' has shape " + diffmath::shape_str(a->shape));
    }
    std::copy(a->data.begin(), a->data.end(), t.data().begin());
  }
  return m;
}

inline AdamState restore_adam(const Checkpoint & c, const model::ParameterSet & params)
{
  AdamState s;
  s.step = c.adam_step;
  if (!c.find("adam.m/" + params.items().front().first)) {
    return s;
  }
  for (const auto & [name, t] : params.items()) {
    const NamedArray * m = c.find("adam.m/" + name);
    const NamedArray * v = c.find("adam.v/" + name);
    if (!m || !v || m->data.size() != t.numel() || v->data.size() != t.numel()) {
      throw CheckpointError("checkpoint optimizer state for '" + name + "' missing or malformed");
    }
    s.m.push_back(m->data);
    s.v.push_back(v->data);
  }
  return s;
}

inline void write_checkpoint(const std::string & path, const Checkpoint & c)
{
  nlohmann::json header;
  header["format"] = 1;
  header["config"] = to_json(c.config);
  header["normalization"] = {
    {"state_mean", c.normalization.state_mean},
    {"state_std", c.normalization.state_std},
    {"output_scale", c.normalization.output_scale}};
  header["epoch"] = c.epoch;
  header["adam_step"] = c.adam_step;
  header["rng"] = {{"key", c.rng_key}, {"counter", c.rng_counter}};
  nlohmann::json index = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto & a : c.arrays) {
    index.push_back({{"name", a.name}, {"shape", a.shape}, {"offset", offset}, {"count", a.data.size()}});
    offset += a.data.size();
  }
  header["arrays"] = std::move(index);
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw CheckpointError("cannot open '" + path + "' for writing");
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char *>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto & a : c.arrays) {
    out.write(reinterpret_cast<const char *>(a.data.data()), static_cast<std::streamsize>(a.data.size() * sizeof(double)));
  }
  if (!out) {
    throw CheckpointError("failed writing '" + path + "'");
  }
}

inline Checkpoint read_checkpoint(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CheckpointError("cannot open checkpoint '" + path + "'");
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw CheckpointError("'" + path + "' is not a checkpoint file");
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char *>(&len), sizeof(len));
  if (!in || len > (1ULL << 30)) {
    throw CheckpointError("'" + path + "' has a corrupt header length");
  }
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) {
    throw CheckpointError("'" + path + "' is truncated");
  }
  Checkpoint c;
  try {
    const auto header = nlohmann::json::parse(text);
    c.config = train_config_from_json(header.at("config"));
    const auto & n = header.at("normalization");
    c.normalization.state_mean = n.at("state_mean").get<std::array<double, kStateDim>>();
    c.normalization.state_std = n.at("state_std").get<std::array<double, kStateDim>>();
    c.normalization.output_scale = n.at("output_scale").get<std::array<double, 2>>();
    c.epoch = header.at("epoch").get<std::size_t>();
    c.adam_step = header.at("adam_step").get<std::size_t>();
    c.rng_key = header.at("rng").at("key").get<std::uint64_t>();
    c.rng_counter = header.at("rng").at("counter").get<std::uint64_t>();
    for (const auto & a : header.at("arrays")) {
      NamedArray arr;
      arr.name = a.at("name").get<std::string>();
      arr.shape = a.at("shape").get<diffmath::Shape>();
      arr.data.resize(a.at("count").get<std::size_t>());
      c.arrays.push_back(std::move(arr));
    }
  } catch (const nlohmann::json::exception & e) {
    throw CheckpointError("'" + path + "' has a malformed header: " + e.what());
  }
  for (auto & a : c.arrays) {
    in.read(reinterpret_cast<char *>(a.data.data()), static_cast<std::streamsize>(a.data.size() * sizeof(double)));
    if (!in) {
      throw CheckpointError("'" + path + "' payload is truncated");
    }
  }
  return c;
}

}  // namespace mtrvp::training

#endif  // MTRVP__TRAINING__CHECKPOINT_HPP_
