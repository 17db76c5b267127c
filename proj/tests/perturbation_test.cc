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

#include "chicontract/perturbation.h"

#include <cmath>
#include <vector>

#include "chicontract/channels.h"
#include "gtest/gtest.h"

namespace chicontract {
namespace {

TEST(PaninskiTest, MembersArePairFlips) {
  const PerturbedFamily f = *PaninskiFamily(4, 0.1);
  EXPECT_DOUBLE_EQ(f.scale(), 0.2);
  Eigen::VectorXd z(2);
  z << 1, -1;
  const Distribution p = *f.Member(z);
  EXPECT_NEAR(p[0], 0.25 * 1.2, 1e-15);
  EXPECT_NEAR(p[1], 0.25 * 0.8, 1e-15);
  EXPECT_NEAR(p[2], 0.25 * 0.8, 1e-15);
  EXPECT_NEAR(p[3], 0.25 * 1.2, 1e-15);
  EXPECT_NEAR(f.DistanceFromNominal(z), 0.1, 1e-15);
}

TEST(PaninskiTest, RejectsBadParameters) {
  EXPECT_FALSE(PaninskiFamily(3, 0.1).ok());
  EXPECT_FALSE(PaninskiFamily(4, 0.6).ok());
  EXPECT_FALSE(PaninskiFamily(4, -0.1).ok());
}

TEST(ZetaLawTest, RademacherAtoms) {
  const ZetaLaw zeta = ZetaLaw::Rademacher(3);
  double total = 0;
  int atoms = 0;
  zeta.ForEachAtom([&](const Eigen::VectorXd& z, double w) {
    EXPECT_EQ(z.cwiseAbs().minCoeff(), 1.0);
    total += w;
    ++atoms;
  });
  EXPECT_EQ(atoms, 8);
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(ZetaLawTest, LinearAtomsAreMixed) {
  Eigen::MatrixXd v(2, 1);
  v << 1, -1;
  const ZetaLaw zeta = ZetaLaw::Linear(v / std::sqrt(2.0));
  EXPECT_EQ(zeta.latent_dim(), 1);
  EXPECT_TRUE(zeta.exhaustive());
  zeta.ForEachAtom([&](const Eigen::VectorXd& z, double w) {
    EXPECT_NEAR(std::abs(z(0)), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(z(0), -z(1), 1e-15);
    EXPECT_EQ(w, 0.5);
  });
}

TEST(PerturbationTest, NormalizedAndInduced) {
  const Distribution q = Distribution::Uniform(4);
  const Distribution p = *Distribution::Create({0.3, 0.2, 0.25, 0.25});
  const PerturbationVector d = *NormalizedPerturbation(p, q);
  EXPECT_NEAR(d.values(0), 0.2, 1e-15);
  EXPECT_NEAR(d.values(1), -0.2, 1e-15);
  const PerturbationVector dw = *InducedPerturbation(*IdentityChannel(4), p, q);
  EXPECT_TRUE(dw.values.isApprox(d.values));
  // Parity only sees the mass on odd inputs, which this member leaves at 1/2.
  const Distribution balanced = *Distribution::Create({0.3, 0.2, 0.2, 0.3});
  const PerturbationVector dp = *InducedPerturbation(*ParityChannel(4), balanced, q);
  EXPECT_LE(dp.values.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PerturbationTest, InnerProductGivesChiSquare) {
  const Distribution q = *Distribution::Create({0.1, 0.2, 0.3, 0.4});
  const Distribution p = *Distribution::Create({0.25, 0.25, 0.25, 0.25});
  const PerturbationVector d = *NormalizedPerturbation(p, q);
  EXPECT_NEAR(WeightedInnerProduct(d, d, q.probs()),
              *Divergence(p, q, DivergenceKind::kChiSquare), 1e-14);
}

TEST(AlmostPerturbationTest, PaninskiAlwaysAtDistance) {
  const PerturbedFamily f = *PaninskiFamily(8, 0.05);
  const AlmostPerturbationCheck check = *CheckAlmostPerturbation(f, 0.05, 2000, 1);
  EXPECT_EQ(check.hits, 2000);
  EXPECT_EQ(check.invalid_members, 0);
  EXPECT_TRUE(check.pass);
}

TEST(ClopperPearsonTest, KnownValues) {
  EXPECT_EQ(ClopperPearsonLower(0, 10, 0.99), 0.0);
  // All hits: lower bound is (1 - confidence)^(1/n).
  EXPECT_NEAR(ClopperPearsonLower(10, 10, 0.99), std::pow(0.01, 0.1), 1e-12);
  EXPECT_LT(ClopperPearsonLower(50, 100, 0.99), 0.5);
}

}  // namespace
}  // namespace chicontract
