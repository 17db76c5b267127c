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

#include "chicontract/channels.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace chicontract {
namespace {

TEST(StandardChannelsTest, Shapes) {
  EXPECT_EQ(IdentityChannel(6)->m(), 6);
  EXPECT_EQ(ConstantChannel(6, 3)->m(), 3);
  EXPECT_EQ(ParityChannel(6)->m(), 2);
  EXPECT_EQ(QuantizerChannel(16, 2)->m(), 4);
  EXPECT_EQ(RandomizedResponseChannel(5, 1.0)->m(), 5);
  EXPECT_FALSE(ParityChannel(5).ok());
  EXPECT_FALSE(RandomizedResponseChannel(4, -1.0).ok());
}

TEST(StandardChannelsTest, ParityMapsOddAndEven) {
  const Channel w = *ParityChannel(4);
  // Inputs 1 and 3 (indices 0 and 2) share an output.
  EXPECT_EQ(w(0, 0), w(0, 2));
  EXPECT_EQ(w(0, 1), w(0, 3));
  EXPECT_NE(w(0, 0), w(0, 1));
}

TEST(StandardChannelsTest, RandomizedResponseIsTightLdp) {
  const Channel w = *RandomizedResponseChannel(4, 0.7);
  const LdpCheck check = CheckLdp(w, 0.7);
  EXPECT_TRUE(check.satisfied);
  EXPECT_NEAR(check.worst_ratio, std::exp(0.7), 1e-12);
  EXPECT_FALSE(CheckLdp(w, 0.69).satisfied);
}

TEST(StandardChannelsTest, LookupByName) {
  EXPECT_TRUE(StandardChannel("identity", 4).ok());
  EXPECT_TRUE(StandardChannel("rr", 4, 0.5).ok());
  EXPECT_EQ(StandardChannel("nope", 4).status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(PairPartitionTest, SignsPickTheOutput) {
  const std::vector<int> signs = {1, -1};
  const Channel w = *PairPartitionChannel(signs);
  ASSERT_EQ(w.k(), 4);
  ASSERT_EQ(w.m(), 2);
  EXPECT_EQ(w(0, 0) + w(0, 1), 1.0);
  EXPECT_NE(w(0, 0), w(0, 2));
  EXPECT_FALSE(PairPartitionChannel(std::vector<int>{1, 0}).ok());
}

TEST(ConstraintTest, CommCountsReachableOutputs) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 2);
  m(0, 0) = 1;
  m(1, 1) = 1;
  const Channel w = *Channel::Create(m);
  EXPECT_EQ(w.ReachableOutputs(), 2);
  EXPECT_TRUE(CheckComm(w, 1));
  EXPECT_FALSE(CheckComm(*IdentityChannel(8), 2));
  EXPECT_TRUE(CheckComm(*IdentityChannel(8), 3));
}

TEST(ConstraintTest, Validation) {
  EXPECT_FALSE(ValidateConstraint(ConstraintSpec::Communication(0)).ok());
  EXPECT_FALSE(ValidateConstraint(ConstraintSpec::Privacy(0.0)).ok());
  EXPECT_TRUE(ValidateConstraint(ConstraintSpec::Privacy(2.0)).ok());
  EXPECT_TRUE(ConstraintSpec::Privacy(2.0).OutsidePrivacyRegime());
}

TEST(RandomChannelsTest, GeneratorsRespectTheirConstraints) {
  CounterRng rng(11, 0);
  for (int t = 0; t < 100; ++t) {
    const Channel comm = *RandomCommChannel(8, 1 + t % 3, rng);
    EXPECT_TRUE(CheckComm(comm, 1 + t % 3));
    const double rho = 0.2 + 0.1 * (t % 8);
    const Channel ldp = *RandomLdpChannel(8, 2 + t % 5, rho, rng);
    EXPECT_TRUE(CheckLdp(ldp, rho).satisfied);
  }
}

TEST(RandomChannelsTest, SameSeedSameChannel) {
  CounterRng a(3, 1), b(3, 1);
  EXPECT_EQ(RandomChannel(6, 4, a)->matrix(), RandomChannel(6, 4, b)->matrix());
}

}  // namespace
}  // namespace chicontract
