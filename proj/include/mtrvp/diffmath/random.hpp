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

#ifndef MTRVP__DIFFMATH__RANDOM_HPP_
#define MTRVP__DIFFMATH__RANDOM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace mtrvp
{

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/**
 * @brief Counter-based splittable generator.
 *
 * The n-th draw is a pure function of (key, n), where key is derived from
 * (seed, stream). Child streams are derived with split(), so the full state
 * is the pair (key, counter) and results never depend on the standard
 * library's distribution implementations.
 */
class Rng
{
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
  : key_(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 1)))
  {
  }

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. Consumes two draws.
  double normal()
  {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n)
  {
    __extension__ using u128 = unsigned __int128;
    const u128 prod = static_cast<u128>(next_u64()) * n;
    return static_cast<std::size_t>(prod >> 64);
  }

  Rng split(std::uint64_t stream) const
  {
    Rng child(0);
    child.key_ = splitmix64(key_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    return child;
  }

  template <typename T>
  void shuffle(std::vector<T> & v)
  {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static Rng restore(std::uint64_t key, std::uint64_t counter)
  {
    Rng r(0);
    r.key_ = key;
    r.counter_ = counter;
    return r;
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_{0};
};

}  // namespace mtrvp

#endif  // MTRVP__DIFFMATH__RANDOM_HPP_
