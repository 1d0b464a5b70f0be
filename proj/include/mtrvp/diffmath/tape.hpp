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

#ifndef MTRVP__DIFFMATH__TAPE_HPP_
#define MTRVP__DIFFMATH__TAPE_HPP_

#include <functional>
#include <utility>
#include <vector>

#include "mtrvp/diffmath/tensor.hpp"

namespace mtrvp::diffmath
{

/**
 * @brief Wengert list of differentiable operations.
 *
 * Operations append themselves in execution order, so the list is already
 * topologically sorted. backward() replays it in reverse and only runs rules
 * whose output received a gradient, which leaves tensors that are not
 * ancestors of the loss untouched.
 *
 * A tape is not thread-safe; use one per model instance and thread.
 */
class Tape
{
public:
  using BackwardFn = std::function<void()>;

  /// Records a backward rule for output. Skipped when recording is disabled.
  void record(const Tensor & output, BackwardFn fn)
  {
    if (enabled_) {
      entries_.push_back({output, std::move(fn)});
    }
  }

  void backward(Tensor & loss)
  {
    if (loss.numel() != 1) {
      throw ShapeError("backward() needs a scalar loss, got " + shape_str(loss.shape()));
    }
    loss.grad()[0] += 1.0;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
      if (it->output.has_grad()) {
        it->fn();
      }
    }
  }

  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }

  /// Inference mode: ops still compute values but record nothing.
  void set_enabled(bool on) { enabled_ = on; }
  bool enabled() const { return enabled_; }

private:
  struct Entry
  {
    Tensor output;
    BackwardFn fn;
  };

  std::vector<Entry> entries_;
  bool enabled_{true};
};

}  // namespace mtrvp::diffmath

#endif  // MTRVP__DIFFMATH__TAPE_HPP_
