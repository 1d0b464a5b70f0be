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

#ifndef MTRVP__DIFFMATH__TENSOR_HPP_
#define MTRVP__DIFFMATH__TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mtrvp/core/types.hpp"

namespace mtrvp::diffmath
{

using Real = double;
using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape & s)
{
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape & s)
{
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += (i ? "x" : "") + std::to_string(s[i]);
  }
  return out + "]";
}

namespace detail
{

struct TensorData
{
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until first accumulation
  bool requires_grad{false};
};

}  // namespace detail

/**
 * @brief Dense row-major array with an optional gradient buffer.
 *
 * Copies share storage (handle semantics), which is what the tape needs to
 * route gradients back to parameters. Use clone() for a deep copy.
 */
class Tensor
{
public:
  Tensor() = default;

  explicit Tensor(Shape shape, Real fill = 0.0, bool requires_grad = false)
  : p_(std::make_shared<detail::TensorData>())
  {
    p_->value.assign(shape_numel(shape), fill);
    p_->shape = std::move(shape);
    p_->requires_grad = requires_grad;
  }

  static Tensor from(Shape shape, std::vector<Real> values, bool requires_grad = false)
  {
    if (shape_numel(shape) != values.size()) {
      throw ShapeError(
        "tensor shape " + shape_str(shape) + " does not hold " + std::to_string(values.size()) +
        " values");
    }
    Tensor t;
    t.p_ = std::make_shared<detail::TensorData>();
    t.p_->shape = std::move(shape);
    t.p_->value = std::move(values);
    t.p_->requires_grad = requires_grad;
    return t;
  }

  static Tensor scalar(Real v, bool requires_grad = false) { return from({1}, {v}, requires_grad); }

  bool defined() const { return static_cast<bool>(p_); }

  const Shape & shape() const { return p_->shape; }
  std::size_t rank() const { return p_->shape.size(); }
  std::size_t dim(std::size_t i) const { return p_->shape.at(i); }
  std::size_t numel() const { return p_->value.size(); }

  std::span<Real> data() { return p_->value; }
  std::span<const Real> data() const { return p_->value; }
  Real * ptr() { return p_->value.data(); }
  const Real * ptr() const { return p_->value.data(); }

  Real item() const
  {
    if (numel() != 1) {
      throw ShapeError("item() on tensor of shape " + shape_str(shape()));
    }
    return p_->value[0];
  }

  bool requires_grad() const { return p_->requires_grad; }
  void set_requires_grad(bool on) { p_->requires_grad = on; }

  bool has_grad() const { return !p_->grad.empty(); }

  /// Mutable gradient buffer, allocated as zeros on first use.
  std::span<Real> grad()
  {
    if (p_->grad.empty()) {
      p_->grad.assign(p_->value.size(), 0.0);
    }
    return p_->grad;
  }

  /// Read-only view; empty when no gradient has been accumulated.
  std::span<const Real> grad() const { return p_->grad; }

  void zero_grad() { std::fill(p_->grad.begin(), p_->grad.end(), 0.0); }
  void clear_grad() { p_->grad.clear(); }

  Tensor clone() const
  {
    Tensor t = from(p_->shape, p_->value, p_->requires_grad);
    t.p_->grad = p_->grad;
    return t;
  }

  /// Same data under a new shape, fresh storage and no gradient.
  Tensor reshaped_copy(Shape shape) const { return from(std::move(shape), p_->value); }

  bool same_storage(const Tensor & o) const { return p_ == o.p_; }

private:
  std::shared_ptr<detail::TensorData> p_;
};

}  // namespace mtrvp::diffmath

#endif  // MTRVP__DIFFMATH__TENSOR_HPP_
