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

#ifndef MTRVP__TRAINING__SPLIT_HPP_
#define MTRVP__TRAINING__SPLIT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mtrvp/diffmath/random.hpp"

namespace mtrvp::training
{

/// Seeded shuffle into (train, validation). With n >= 2 both sides are non-empty.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(
  const std::vector<T> & items, double ratio, std::uint64_t seed)
{
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split ratio must lie in (0, 1)");
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, 0x73706c6974ULL);
  rng.shuffle(order);
  const std::size_t n = items.size();
  std::size_t n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n >= 2) {
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  } else {
    n_train = n;
  }
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(n_train);
  out.second.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? out.first : out.second).push_back(items[order[i]]);
  }
  return out;
}

}  // namespace mtrvp::training

#endif  // MTRVP__TRAINING__SPLIT_HPP_
