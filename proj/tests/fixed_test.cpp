/*
 * Copyright 2026 The gcnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gcnsim/fixed.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace gcnsim {
namespace {

TEST(Fixed32, ExactValuesQuantizeToExpectedRaw) {
  DenseMatrix<double> m(2, 2);
  m << 1.0, 0.5, 0.0, -1.0;
  const FeatureMatrix q = quantize(m);
  EXPECT_EQ(q(0, 0).raw(), 65536);
  EXPECT_EQ(q(0, 1).raw(), 32768);
  EXPECT_EQ(q(1, 0).raw(), 0);
  EXPECT_EQ(q(1, 1).raw(), -65536);
}

TEST(Fixed32, RoundingErrorIsAtMostHalfAnUlp) {
  const Fixed32 f = Fixed32::from_double(3.0000001);
  EXPECT_LE(std::abs(f.to_double() - 3.0000001), std::ldexp(1.0, -17));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1000.0, 1000.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = dist(rng);
    EXPECT_LE(std::abs(Fixed32::from_double(v).to_double() - v), std::ldexp(1.0, -17));
  }
}

TEST(Fixed32, OutOfRangeSaturates) {
  EXPECT_EQ(Fixed32::from_double(40000.0), Fixed32::max());
  EXPECT_NEAR(Fixed32::from_double(40000.0).to_double(), 32767.99998, 1e-5);
  EXPECT_EQ(Fixed32::from_double(-40000.0), Fixed32::lowest());
  EXPECT_EQ(Fixed32::max() + Fixed32(1), Fixed32::max());
  EXPECT_EQ(Fixed32::lowest() - Fixed32(1), Fixed32::lowest());
  EXPECT_EQ(Fixed32(200) * Fixed32(200), Fixed32::max());
}

TEST(Fixed32, TiesRoundAwayFromZero) {
  EXPECT_EQ(Fixed32::round_shift(int64_t{3}, 1), 2);
  EXPECT_EQ(Fixed32::round_shift(int64_t{-3}, 1), -2);
  EXPECT_EQ(Fixed32::round_shift(int64_t{5}, 2), 1);
  EXPECT_EQ(Fixed32::from_double(std::ldexp(1.0, -17)).raw(), 1);
  EXPECT_EQ(Fixed32::from_double(-std::ldexp(1.0, -17)).raw(), -1);
}

TEST(Fixed32, MultiplyAndDivideMatchDoubleWithinOneUlp) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  const double ulp = std::ldexp(1.0, -16);
  for (int i = 0; i < 10000; ++i) {
    const Fixed32 a = Fixed32::from_double(dist(rng));
    const Fixed32 b = Fixed32::from_double(dist(rng));
    EXPECT_LE(std::abs((a * b).to_double() - a.to_double() * b.to_double()), ulp / 2 + 1e-12);
    if (std::abs(b.to_double()) > 0.5) {
      EXPECT_LE(std::abs((a / b).to_double() - a.to_double() / b.to_double()), ulp / 2 + 1e-12);
    }
  }
}

TEST(Fixed32, AdditionIsOrderIndependentWithoutSaturation) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int32_t> dist(-(1 << 20), 1 << 20);
  std::vector<Fixed32> xs(64);
  for (auto& x : xs) x = Fixed32::from_raw(dist(rng));
  Fixed32 forward{};
  for (auto x : xs) forward += x;
  std::shuffle(xs.begin(), xs.end(), rng);
  Fixed32 shuffled{};
  for (auto x : xs) shuffled += x;
  EXPECT_EQ(forward, shuffled);
}

TEST(Fixed32, DivideRawRoundsToNearest) {
  EXPECT_EQ(divide_raw(7, 2).raw(), 4);
  EXPECT_EQ(divide_raw(-7, 2).raw(), -4);
  EXPECT_EQ(divide_raw(6, 3).raw(), 2);
  EXPECT_EQ(divide_raw(int64_t{Fixed32::kMaxRaw} * 4, 2), Fixed32::max());
}

TEST(Fixed32, FirstMismatchReportsRowAndColumn) {
  FeatureMatrix a = FeatureMatrix::Zero(3, 4);
  FeatureMatrix b = a;
  EXPECT_FALSE(first_mismatch(a, b));
  b(2, 1) = Fixed32(1);
  b(2, 3) = Fixed32(1);
  const auto at = first_mismatch(a, b);
  ASSERT_TRUE(at);
  EXPECT_EQ(at->first, 2);
  EXPECT_EQ(at->second, 1);
}

}  // namespace
}  // namespace gcnsim
