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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mtrvp/diffmath/attention.hpp"
#include "mtrvp/diffmath/ops.hpp"
#include "mtrvp/diffmath/random.hpp"
#include "oracles.hpp"

namespace
{

using namespace mtrvp;
using namespace mtrvp::diffmath;
using oracle::check_gradients;
using oracle::random_tensor;

constexpr double kOpTol = 1e-5;

// ---------------------------------------------------------------------------
// Rng

TEST(Rng, DeterministicAndStreamSeparated)
{
  Rng a(42), b(42), c(42, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(Rng, RestoreContinuesSequence)
{
  Rng a(3, 9);
  for (int i = 0; i < 17; ++i) a.next_u64();
  Rng b = Rng::restore(a.key(), a.counter());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformAndBelowRanges)
{
  Rng r(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}

// ---------------------------------------------------------------------------
// Tensor and tape basics

TEST(Tensor, ShapeMustMatchData)
{
  EXPECT_THROW(Tensor::from({2, 3}, {1, 2, 3}), ShapeError);
  const auto t = Tensor::from({2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(t.numel(), 4u);
  EXPECT_FALSE(t.has_grad());
}

TEST(Tape, SumGivesOnes)
{
  Tape tape;
  Tensor x = Tensor::from({3}, {1, -2, 5}, true);
  Tensor l = sum(tape, x);
  tape.backward(l);
  for (double g : std::as_const(x).grad()) EXPECT_EQ(g, 1.0);
}

TEST(Tape, SumOfSquares)
{
  Tape tape;
  Tensor x = Tensor::from({2}, {1, 2}, true);
  Tensor l = sum(tape, mul(tape, x, x));
  tape.backward(l);
  EXPECT_EQ(std::as_const(x).grad()[0], 2.0);
  EXPECT_EQ(std::as_const(x).grad()[1], 4.0);
}

TEST(Tape, NonScalarLossRejected)
{
  Tape tape;
  Tensor x = Tensor::from({2}, {1, 2}, true);
  Tensor y = scale(tape, x, 2.0);
  EXPECT_THROW(tape.backward(y), ShapeError);
}

TEST(Tape, UnreachableGradsUntouched)
{
  Tape tape;
  Tensor x = Tensor::from({2}, {1, 2}, true);
  Tensor z = Tensor::from({2}, {3, 4}, true);
  Tensor unused = scale(tape, z, 3.0);
  Tensor l = sum(tape, x);
  tape.backward(l);
  EXPECT_FALSE(z.has_grad());
  EXPECT_TRUE(x.has_grad());
}

TEST(Tape, DisabledRecordsNothing)
{
  Tape tape;
  tape.set_enabled(false);
  Tensor x = Tensor::from({2}, {1, 2}, true);
  sum(tape, relu(tape, x));
  EXPECT_EQ(tape.size(), 0u);
}

TEST(Tape, BackwardIsBitDeterministic)
{
  Rng rng(1);
  Tensor a = random_tensor({4, 5}, rng);
  Tensor b = random_tensor({5, 3}, rng);
  auto run = [&]() {
    a.clear_grad();
    b.clear_grad();
    Tape tape;
    Tensor l = sum_sq(tape, softmax(tape, matmul(tape, a, b), 1));
    tape.backward(l);
    return std::vector<double>(std::as_const(a).grad().begin(), std::as_const(a).grad().end());
  };
  EXPECT_EQ(run(), run());
}

// ---------------------------------------------------------------------------
// Forward values

TEST(Matmul, IdentityAndHandValues)
{
  Tape tape;
  const auto eye = Tensor::from({2, 2}, {1, 0, 0, 1});
  const auto x = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto y = matmul(tape, eye, x);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(y.data()[i], x.data()[i]);
  const auto z = matmul(tape, Tensor::from({2, 2}, {1, 2, 3, 4}), Tensor::from({2, 1}, {1, 1}));
  EXPECT_EQ(z.shape(), (Shape{2, 1}));
  EXPECT_EQ(z.data()[0], 3.0);
  EXPECT_EQ(z.data()[1], 7.0);
  EXPECT_THROW(matmul(tape, x, x), ShapeError);
}

TEST(Matmul, IntegerAssociativityExact)
{
  Rng rng(8);
  auto ints = [&](Shape s) {
    Tensor t(s);
    for (auto & v : t.data()) v = static_cast<double>(static_cast<int>(rng.below(11)) - 5);
    return t;
  };
  Tape tape;
  const auto a = ints({3, 4}), b = ints({4, 5}), c = ints({5, 2});
  const auto l = matmul(tape, matmul(tape, a, b), c);
  const auto r = matmul(tape, a, matmul(tape, b, c));
  for (std::size_t i = 0; i < l.numel(); ++i) EXPECT_EQ(l.data()[i], r.data()[i]);
}

TEST(Softmax, UniformAndStable)
{
  Tape tape;
  const auto u = softmax(tape, Tensor::from({1, 3}, {0, 0, 0}), 1);
  for (double v : u.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  const auto s = softmax(tape, Tensor::from({1, 2}, {1000, 0}), 1);
  EXPECT_NEAR(s.data()[0], 1.0, 1e-12);
  EXPECT_NEAR(s.data()[1], 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(s.data()[1]));
}

TEST(Softmax, RowsSumToOne)
{
  Rng rng(2);
  Tape tape;
  const auto x = random_tensor({3, 4, 5}, rng, false);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const auto y = softmax(tape, scale(tape, x, 30.0), axis);
    const auto s = detail::split_axis(x.shape(), axis);
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        double total = 0.0;
        for (std::size_t a = 0; a < s.n; ++a) total += y.data()[(o * s.n + a) * s.inner + in];
        EXPECT_NEAR(total, 1.0, 1e-9);
      }
    }
  }
}

TEST(LayerNorm, ConstantRowGivesZeros)
{
  Tape tape;
  const auto y = layer_norm(tape, Tensor({2, 4}, 3.5), Tensor({4}, 1.0), Tensor({4}, 0.0));
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(Linear, IdentityWeights)
{
  Tape tape;
  const auto x = Tensor::from({2, 2}, {1.5, -2, 3, 0.25});
  const auto y = linear(tape, x, Tensor::from({2, 2}, {1, 0, 0, 1}), Tensor({2}));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(y.data()[i], x.data()[i]);
}

TEST(Cumsum, PrefixSums)
{
  Tape tape;
  const auto y = cumsum(tape, Tensor::from({1, 4}, {1, 2, 3, 4}), 1);
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{1, 3, 6, 10}));
}

TEST(Concat, LayoutAlongAxis)
{
  Tape tape;
  const auto y = concat(tape, {Tensor::from({2, 1}, {1, 2}), Tensor::from({2, 2}, {3, 4, 5, 6})}, 1);
  EXPECT_EQ(y.shape(), (Shape{2, 3}));
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{1, 3, 4, 2, 5, 6}));
}

TEST(Broadcast, SuffixOnlyAndRejected)
{
  Tape tape;
  const auto y = add(tape, Tensor({2, 3}, 1.0), Tensor::from({3}, {1, 2, 3}));
  EXPECT_EQ(y.data()[4], 3.0);
  EXPECT_THROW(add(tape, Tensor({2, 3}), Tensor({2})), ShapeError);
}

TEST(Attention, SingleKeyWeightsAreOne)
{
  Rng rng(4);
  Tape tape;
  const auto q = random_tensor({2, 3, 8}, rng, false);
  const auto k = random_tensor({2, 1, 8}, rng, false);
  const auto v = random_tensor({2, 1, 8}, rng, false);
  const auto out = scaled_dot_product_attention(tape, q, k, v, 2);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t c = 0; c < 8; ++c) {
        EXPECT_EQ(out.data()[(b * 3 + i) * 8 + c], v.data()[b * 8 + c]);
      }
    }
  }
}

TEST(Attention, KeyPermutationInvariant)
{
  Rng rng(6);
  Tape tape;
  const auto q = random_tensor({1, 2, 4}, rng, false);
  const auto k = random_tensor({1, 3, 4}, rng, false);
  const auto v = random_tensor({1, 3, 4}, rng, false);
  auto permute = [](const Tensor & t) {
    Tensor p(t.shape());
    const std::size_t order[3] = {2, 0, 1};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t c = 0; c < 4; ++c) p.ptr()[i * 4 + c] = t.ptr()[order[i] * 4 + c];
    }
    return p;
  };
  const auto a = scaled_dot_product_attention(tape, q, k, v, 2);
  const auto b = scaled_dot_product_attention(tape, q, permute(k), permute(v), 2);
  for (std::size_t i = 0; i < a.numel(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-14);
}

TEST(Attention, HeadsMustDivide)
{
  Rng rng(6);
  Tape tape;
  const auto q = random_tensor({1, 2, 6}, rng, false);
  EXPECT_THROW(scaled_dot_product_attention(tape, q, q, q, 4), ShapeError);
}

// ---------------------------------------------------------------------------
// Gradients, each op against central differences

class OpGradient : public ::testing::Test
{
protected:
  Rng rng{2024};
};

TEST_F(OpGradient, Matmul)
{
  auto a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng), w = random_tensor({3, 2}, rng, false);
  auto r = check_gradients([&](Tape & t) { return sum(t, mul(t, matmul(t, a, b), w)); }, {a, b}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, BatchedMatmul)
{
  auto a = random_tensor({2, 3, 4}, rng), b = random_tensor({2, 4, 2}, rng), w = random_tensor({2, 3, 2}, rng, false);
  auto r = check_gradients([&](Tape & t) { return sum(t, mul(t, matmul(t, a, b), w)); }, {a, b}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, AddSubMulWithBroadcast)
{
  auto a = random_tensor({2, 3, 4}, rng), b = random_tensor({3, 4}, rng), c = random_tensor({4}, rng);
  auto r = check_gradients(
    [&](Tape & t) { return sum_sq(t, mul(t, sub(t, add(t, a, b), c), add(t, a, c))); }, {a, b, c}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, ScaleReluMean)
{
  auto a = random_tensor({5, 4}, rng);
  auto r = check_gradients([&](Tape & t) { return mean(t, relu(t, scale(t, a, -1.5))); }, {a}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, Linear)
{
  auto x = random_tensor({2, 3, 5}, rng), w = random_tensor({5, 4}, rng), b = random_tensor({4}, rng);
  auto r = check_gradients([&](Tape & t) { return sum_sq(t, linear(t, x, w, b)); }, {x, w, b}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, SoftmaxEveryAxis)
{
  for (std::size_t axis = 0; axis < 3; ++axis) {
    auto x = random_tensor({2, 3, 4}, rng), w = random_tensor({2, 3, 4}, rng, false);
    auto r = check_gradients([&](Tape & t) { return sum(t, mul(t, softmax(t, x, axis), w)); }, {x}, rng);
    EXPECT_LE(r.max_rel_err, kOpTol) << "axis " << axis;
  }
}

TEST_F(OpGradient, LogSoftmax)
{
  auto x = random_tensor({3, 5}, rng), w = random_tensor({3, 5}, rng, false);
  auto r = check_gradients([&](Tape & t) { return sum(t, mul(t, log_softmax(t, x, 1), w)); }, {x}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, LayerNorm)
{
  auto x = random_tensor({3, 6}, rng), g = random_tensor({6}, rng), b = random_tensor({6}, rng);
  auto w = random_tensor({3, 6}, rng, false);
  auto r = check_gradients([&](Tape & t) { return sum(t, mul(t, layer_norm(t, x, g, b), w)); }, {x, g, b}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, ReshapeConcatCumsum)
{
  auto a = random_tensor({2, 3}, rng), b = random_tensor({2, 2}, rng), w = random_tensor({5, 2}, rng, false);
  auto r = check_gradients(
    [&](Tape & t) {
      auto c = concat(t, {a, b}, 1);
      return sum(t, mul(t, cumsum(t, reshape(t, c, {5, 2}), 0), w));
    },
    {a, b}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, SelectPerRow)
{
  auto x = random_tensor({3, 4, 2}, rng);
  auto r = check_gradients([&](Tape & t) { return sum_sq(t, select_per_row(t, x, {2, 0, 3})); }, {x}, rng, 24);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, ScaledDotProductAttention)
{
  auto q = random_tensor({2, 3, 8}, rng), k = random_tensor({2, 5, 8}, rng), v = random_tensor({2, 5, 8}, rng);
  auto w = random_tensor({2, 3, 8}, rng, false);
  auto r = check_gradients(
    [&](Tape & t) { return sum(t, mul(t, scaled_dot_product_attention(t, q, k, v, 4), w)); }, {q, k, v}, rng);
  EXPECT_LE(r.max_rel_err, kOpTol);
}

TEST_F(OpGradient, MultiHeadAttentionProjections)
{
  auto q = random_tensor({2, 1, 6}, rng), kv = random_tensor({2, 4, 5}, rng);
  ProjectionParams p{
    random_tensor({6, 8}, rng), random_tensor({8}, rng), random_tensor({5, 8}, rng), random_tensor({8}, rng),
    random_tensor({5, 8}, rng), random_tensor({8}, rng), random_tensor({8, 3}, rng), random_tensor({3}, rng)};
  auto w = random_tensor({2, 1, 3}, rng, false);
  auto r = check_gradients(
    [&](Tape & t) { return sum(t, mul(t, multi_head_attention(t, q, kv, kv, p, 2), w)); },
    {q, kv, p.wq, p.bq, p.wk, p.bk, p.wv, p.bv, p.wo, p.bo}, rng);
  EXPECT_LE(r.max_rel_err, 1e-4);
}

}  // namespace
