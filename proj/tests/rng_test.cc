// Copyright 2026 The chi-contract Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chicontract/rng.h"

#include <array>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace chicontract {
namespace {

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(PhiloxTest, KnownAnswers) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (std::array<uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (std::array<uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (std::array<uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRngTest, Reproducible) {
  CounterRng a(42, 3, 1), b(42, 3, 1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRngTest, StreamsDiffer) {
  CounterRng a = CounterRng::ForTrial(42, 0, 0, StreamPurpose::kInput);
  CounterRng b = CounterRng::ForTrial(42, 0, 0, StreamPurpose::kChannelOutput);
  CounterRng c = CounterRng::ForTrial(42, 1, 0, StreamPurpose::kInput);
  CounterRng d = CounterRng::ForTrial(42, 0, 1, StreamPurpose::kInput);
  const uint64_t va = a();
  EXPECT_NE(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}

TEST(CounterRngTest, UniformMoments) {
  CounterRng rng(1, 0);
  double sum = 0, sum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum_sq / n, 1.0 / 3, 0.005);
}

TEST(CounterRngTest, CategoricalFrequencies) {
  CounterRng rng(9, 0);
  const std::vector<double> probs = {0.1, 0.0, 0.6, 0.3};
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.Categorical(probs)];
  EXPECT_EQ(counts[1], 0);
  for (int x : {0, 2, 3}) {
    const double sd = std::sqrt(probs[x] * (1 - probs[x]) / n);
    EXPECT_NEAR(static_cast<double>(counts[x]) / n, probs[x], 5 * sd);
  }
}

TEST(CounterRngTest, RademacherBalanced) {
  CounterRng rng(5, 0);
  int sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const int r = rng.Rademacher();
    ASSERT_TRUE(r == 1 || r == -1);
    sum += r;
  }
  EXPECT_LT(std::abs(sum), 5 * std::sqrt(100000.0));
}

}  // namespace
}  // namespace chicontract
