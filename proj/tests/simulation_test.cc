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

#include "chicontract/simulation.h"

#include <cmath>
#include <vector>

#include "chicontract/channels.h"
#include "chicontract/perturbation.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace chicontract {
namespace {

ProtocolConfig ParityConfig(uint64_t seed) {
  ProtocolConfig cfg;
  cfg.n = 2;
  cfg.seed = seed;
  const Channel parity = *ParityChannel(4);
  cfg.rule.assignments.push_back({{parity, parity}, 1.0});
  return cfg;
}

TEST(SimulateTest, Deterministic) {
  const PerturbedFamily f = *PaninskiFamily(4, 0.3);
  const TrialReport a = *SimulateSmp(ParityConfig(17), f.nominal(), f, 3000);
  const TrialReport b = *SimulateSmp(ParityConfig(17), f.nominal(), f, 3000);
  EXPECT_EQ(a.null_counts, b.null_counts);
  EXPECT_EQ(a.alt_counts, b.alt_counts);
  EXPECT_EQ(a.empirical_tv, b.empirical_tv);
  const TrialReport c = *SimulateSmp(ParityConfig(18), f.nominal(), f, 3000);
  EXPECT_NE(a.alt_counts, c.alt_counts);
}

TEST(SimulateTest, CountsAndExactFields) {
  const PerturbedFamily f = *PaninskiFamily(4, 0.3);
  const TrialReport r = *SimulateSmp(ParityConfig(1), f.nominal(), f, 5000);
  EXPECT_EQ(r.schema, "trial-report/1");
  EXPECT_EQ(r.state_count, 4);
  int64_t total = 0;
  for (int64_t v : r.alt_counts) total += v;
  EXPECT_EQ(total, 5000);
  ASSERT_TRUE(r.exact_tv.has_value());
  EXPECT_NEAR(*r.exact_tv, 0.09, 1e-12);
  EXPECT_NEAR(*r.bayes_error, 0.5 * (1 - 0.09), 1e-12);
  EXPECT_NEAR(r.empirical_tv, *r.exact_tv, 5 * r.empirical_tv_stderr);
}

TEST(ExactBayesErrorTest, MatchesOracle) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 10; ++t) {
    std::vector<oracle::Matrix> mats = {oracle::RandomStochastic(3, 4, gen),
                                        oracle::RandomStochastic(2, 4, gen)};
    std::vector<Channel> ws = {*Channel::Create(mats[0]), *Channel::Create(mats[1])};
    const PerturbedFamily f = *PaninskiFamily(4, 0.2);
    const BayesError be = *ExactBayesError(ws, f, 2);
    EXPECT_NEAR(be.tv, oracle::BruteMixture(mats, 2, oracle::Vec(4, 0.25), 0.4).tv, 1e-12);
    EXPECT_NEAR(be.bayes_error, 0.5 * (1 - be.tv), 1e-15);
  }
}

TEST(EmpiricalTvTest, PlugIn) {
  const std::vector<int64_t> a = {50, 50}, b = {70, 30};
  const TvEstimate e = EmpiricalTv(a, b);
  EXPECT_NEAR(e.tv, 0.2, 1e-15);
  EXPECT_GT(e.std_error, 0.0);
}

TEST(SeparationDemoTest, PublicCoinsWin) {
  const SeparationDemo d = *RunSeparationDemo(8, 2, 0.03);
  EXPECT_EQ(d.assignments, 256);
  EXPECT_LE(d.private_best_tv, 1e-12);
  EXPECT_GT(d.public_tv, 1e-6);
  EXPECT_TRUE(d.separated);
}

TEST(ValidateProtocolTest, Rejections) {
  ProtocolConfig cfg = ParityConfig(0);
  EXPECT_TRUE(ValidateProtocol(cfg, 4).ok());
  EXPECT_FALSE(ValidateProtocol(cfg, 6).ok());
  cfg.n = 3;
  EXPECT_FALSE(ValidateProtocol(cfg, 4).ok());
  cfg = ParityConfig(0);
  cfg.rule.assignments[0].weight = 0;
  EXPECT_FALSE(ValidateProtocol(cfg, 4).ok());
}

}  // namespace
}  // namespace chicontract
