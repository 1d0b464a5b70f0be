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

#ifndef MTRVP__MODEL__PARAMS_HPP_
#define MTRVP__MODEL__PARAMS_HPP_

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtrvp/diffmath/attention.hpp"
#include "mtrvp/diffmath/random.hpp"
#include "mtrvp/diffmath/tensor.hpp"

namespace mtrvp::model
{

using diffmath::Real;
using diffmath::Shape;
using diffmath::Tensor;

/**
 * @brief Named trainable tensors in registration order.
 *
 * Names are stable across runs and are the keys used by checkpoints.
 */
class ParameterSet
{
public:
  Tensor add(const std::string & name, Tensor t)
  {
    if (index_.count(name)) {
      throw std::invalid_argument("duplicate parameter '" + name + "'");
    }
    t.set_requires_grad(true);
    index_[name] = items_.size();
    items_.emplace_back(name, t);
    return t;
  }

  Tensor get(const std::string & name) const
  {
    auto it = index_.find(name);
    if (it == index_.end()) {
      throw std::out_of_range("unknown parameter '" + name + "'");
    }
    return items_[it->second].second;
  }

  bool contains(const std::string & name) const { return index_.count(name) > 0; }

  const std::vector<std::pair<std::string, Tensor>> & items() const { return items_; }

  std::size_t size() const { return items_.size(); }

  std::size_t total_numel() const
  {
    std::size_t n = 0;
    for (const auto & [name, t] : items_) {
      n += t.numel();
    }
    return n;
  }

  void zero_grad()
  {
    for (auto & [name, t] : items_) {
      t.clear_grad();
    }
  }

private:
  std::vector<std::pair<std::string, Tensor>> items_;
  std::map<std::string, std::size_t> index_;
};

/// Glorot/Xavier uniform weight of shape [fan_in x fan_out].
inline Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng & rng)
{
  const Real limit = std::sqrt(6.0 / static_cast<Real>(fan_in + fan_out));
  Tensor w({fan_in, fan_out});
  for (auto & x : w.data()) {
    x = rng.uniform(-limit, limit);
  }
  return w;
}

struct LinearParams
{
  Tensor w;
  Tensor b;

  static LinearParams create(
    ParameterSet & ps, const std::string & name, std::size_t in, std::size_t out, Rng & rng)
  {
    LinearParams p;
    p.w = ps.add(name + ".w", glorot_uniform(in, out, rng));
    p.b = ps.add(name + ".b", Tensor({out}));
    return p;
  }

  Tensor operator()(diffmath::Tape & tape, const Tensor & x) const { return diffmath::linear(tape, x, w, b); }
};

struct LayerNormParams
{
  Tensor gain;
  Tensor bias;

  static LayerNormParams create(ParameterSet & ps, const std::string & name, std::size_t d)
  {
    return {ps.add(name + ".g", Tensor({d}, 1.0)), ps.add(name + ".b", Tensor({d}))};
  }

  Tensor operator()(diffmath::Tape & tape, const Tensor & x) const
  {
    return diffmath::layer_norm(tape, x, gain, bias);
  }
};

/// Attention projections q: d_q -> d_attn, k/v: d_kv -> d_attn, out: d_attn -> d_out.
inline diffmath::ProjectionParams make_attention_params(
  ParameterSet & ps, const std::string & name, std::size_t d_q, std::size_t d_kv, std::size_t d_attn,
  std::size_t d_out, Rng & rng)
{
  diffmath::ProjectionParams p;
  p.wq = ps.add(name + ".wq", glorot_uniform(d_q, d_attn, rng));
  p.bq = ps.add(name + ".bq", Tensor({d_attn}));
  p.wk = ps.add(name + ".wk", glorot_uniform(d_kv, d_attn, rng));
  p.bk = ps.add(name + ".bk", Tensor({d_attn}));
  p.wv = ps.add(name + ".wv", glorot_uniform(d_kv, d_attn, rng));
  p.bv = ps.add(name + ".bv", Tensor({d_attn}));
  p.wo = ps.add(name + ".wo", glorot_uniform(d_attn, d_out, rng));
  p.bo = ps.add(name + ".bo", Tensor({d_out}));
  return p;
}

}  // namespace mtrvp::model

#endif  // MTRVP__MODEL__PARAMS_HPP_
