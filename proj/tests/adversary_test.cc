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

#include "chicontract/adversary.h"

#include <cmath>
#include <random>
#include <vector>

#include "chicontract/channels.h"
#include "chicontract/contraction.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace chicontract {
namespace {

TEST(AdversarialBasisTest, ParityBottomVector) {
  const HMatrix h = *ComputeHMatrix(*ParityChannel(4));
  const AdversaryBasis basis = *AdversarialBasis(h);
  ASSERT_EQ(basis.v.rows(), 2);
  ASSERT_EQ(basis.v.cols(), 1);
  EXPECT_NEAR(basis.v(0, 0), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(basis.v(1, 0), -1 / std::sqrt(2.0), 1e-12);
  EXPECT_LE(basis.Compressed(h.entries()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AdversarialBasisTest, OrthonormalAndDiagonalizing) {
  std::mt19937_64 gen(31);
  for (int k : {8, 16, 24}) {
    const oracle::Matrix w = oracle::RandomStochastic(5, k, gen);
    const HMatrix h = *ComputeHMatrix(*Channel::Create(w));
    const AdversaryBasis basis = *AdversarialBasis(h);
    const Eigen::MatrixXd gram = basis.v.transpose() * basis.v;
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(k / 4, k / 4)).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXd c = basis.Compressed(h.entries());
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(oracle::DirectH(w)).eigenvalues();
    for (int i = 0; i < k / 4; ++i) EXPECT_NEAR(c(i, i), ev(i), 1e-12);
    EXPECT_NEAR(c.squaredNorm(), ev.head(k / 4).squaredNorm(), 1e-12);
  }
}

TEST(AdversarialBasisTest, RejectsSmallK) {
  const HMatrix h = *ComputeHMatrix(*IdentityChannel(2));
  EXPECT_FALSE(AdversarialBasis(h).ok());
}

TEST(AdversarialPerturbationTest, ParityIsBlind) {
  for (int n = 1; n <= 3; ++n) {
    std::vector<Channel> ws(n, *ParityChannel(4));
    const AdversaryResult r = *AdversarialPerturbation(ws, 0.05);
    EXPECT_LE(std::abs(r.report.achieved.value), 1e-12);
    EXPECT_LE(BruteForceMixtureStats(ws, r.family, n)->tv, 1e-12);
  }
}

TEST(AdversarialPerturbationTest, ValueIsSumOfLogCosh) {
  std::mt19937_64 gen(32);
  std::vector<Channel> ws;
  for (int j = 0; j < 3; ++j) ws.push_back(*Channel::Create(oracle::RandomStochastic(3, 8, gen)));
  const double eps = 0.01;
  const AdversaryResult r = *AdversarialPerturbation(ws, eps);
  const double lambda = 3 * std::pow(kAdversaryScale * eps, 2) / 8;
  const Eigen::VectorXd& ev = r.basis.eigenvalues;
  double expected = 0;
  for (int i = 0; i < 2; ++i) expected += std::log(std::cosh(lambda * ev(i)));
  EXPECT_NEAR(r.report.achieved.value, expected, 1e-12);
  EXPECT_LE(r.report.compressed_frobenius_sq, r.report.norm_relation_bound + 1e-12);
  if (r.report.within_validity_regime) {
    EXPECT_LE(r.report.achieved.value, r.report.ceiling);
  }
}

TEST(AdversarialPerturbationTest, ZetaCertificate) {
  std::mt19937_64 gen(33);
  std::vector<Channel> ws = {*Channel::Create(oracle::RandomStochastic(4, 16, gen))};
  AdversaryOptions options;
  options.seed = 5;
  const AdversaryResult r = *AdversarialPerturbation(ws, 0.02, options);
  ASSERT_TRUE(r.report.certificate.has_value());
  EXPECT_EQ(r.report.certificate->trials, 10000);
  EXPECT_GE(r.report.certificate->alpha_hat, 1.0 / 9 - 0.01);
}

TEST(MaxminGapTest, AdversaryNeverBeatsPaninski) {
  std::mt19937_64 gen(34);
  for (int t = 0; t < 10; ++t) {
    std::vector<Channel> ws;
    for (int j = 0; j < 2; ++j) {
      ws.push_back(*Channel::Create(oracle::RandomStochastic(2 + t % 3, 8, gen)));
    }
    const MaxminGap gap = *ComputeMaxminGap(ws, 0.05);
    EXPECT_LE(gap.adversarial_value, gap.paninski_value + 1e-12);
    EXPECT_GE(gap.adversarial_value, 0.0);
  }
}

}  // namespace
}  // namespace chicontract
