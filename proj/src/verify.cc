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

#include "chicontract/verify.h"

#include <cmath>
#include <functional>

#include "absl/strings/str_cat.h"
#include "chicontract/adversary.h"
#include "chicontract/bounds.h"
#include "chicontract/channels.h"
#include "chicontract/contraction.h"
#include "chicontract/fluctuation.h"
#include "chicontract/perturbation.h"
#include "chicontract/prob.h"
#include "chicontract/rng.h"
#include "chicontract/simulation.h"

namespace chicontract {
namespace {

constexpr double kSlack = 1e-12;

bool Le(double a, double b, double rel = kSlack) {
  return a <= b + rel * std::max(1.0, std::abs(b));
}

// Accumulates failures of one check.
class Tally {
 public:
  explicit Tally(std::string name) { check_.name = std::move(name); }

  void Case() { ++check_.cases; }
  void Expect(bool ok, const std::function<std::string()>& what) {
    if (!ok && failures_++ < 3) {
      if (!check_.detail.empty()) check_.detail += "; ";
      check_.detail += what();
    }
  }
  bool Require(const absl::Status& s) {
    Expect(s.ok(), [&] { return std::string(s.message()); });
    return s.ok();
  }
  VerifyCheck Done() {
    check_.pass = failures_ == 0;
    if (failures_ > 3) absl::StrAppend(&check_.detail, " (", failures_, " failures)");
    return check_;
  }

 private:
  VerifyCheck check_;
  int64_t failures_ = 0;
};

Distribution RandomDistribution(int k, CounterRng& rng) {
  std::vector<double> p(k);
  double total = 0.0;
  for (double& v : p) {
    v = -std::log(1.0 - rng.Uniform());
    total += v;
  }
  for (double& v : p) v /= total;
  return *Distribution::Create(std::move(p));
}

VerifyCheck CheckDivergences(int trials, uint64_t seed) {
  Tally t("divergence_chain_and_data_processing");
  CounterRng rng(seed, 1);
  for (int i = 0; i < trials; ++i) {
    const int k = 2 + static_cast<int>(rng() % 7);
    const int m = 2 + static_cast<int>(rng() % 5);
    const Distribution p = RandomDistribution(k, rng);
    const Distribution q = RandomDistribution(k, rng);
    absl::StatusOr<Channel> w = RandomChannel(k, m, rng);
    if (!t.Require(w.status())) continue;
    t.Case();
    const double tv = *Divergence(p, q, DivergenceKind::kTotalVariation);
    const double kl = *Divergence(p, q, DivergenceKind::kKullbackLeibler);
    const double chi2 = *Divergence(p, q, DivergenceKind::kChiSquare);
    t.Expect(Le(2 * tv * tv, kl) && Le(kl, chi2), [&] {
      return absl::StrCat("chain broken: tv=", tv, " kl=", kl, " chi2=", chi2);
    });
    const Distribution wp = *ApplyChannel(*w, p);
    const Distribution wq = *ApplyChannel(*w, q);
    for (DivergenceKind kind : {DivergenceKind::kTotalVariation,
                                DivergenceKind::kKullbackLeibler,
                                DivergenceKind::kChiSquare}) {
      const double before = *Divergence(p, q, kind);
      const double after = *Divergence(wp, wq, kind);
      t.Expect(Le(after, before), [&] {
        return absl::StrCat("data processing: ", after, " > ", before);
      });
    }
    absl::StatusOr<Channel> w2 = RandomChannel(k, m, rng);
    if (!t.Require(w2.status())) continue;
    const double theta = rng.Uniform();
    std::vector<WeightedChannel> parts = {{*w, theta}, {*w2, 1.0 - theta}};
    absl::StatusOr<Channel> mixed = MixChannels(parts);
    if (!t.Require(mixed.status())) continue;
    const Eigen::VectorXd lhs = ApplyChannel(*mixed, p)->AsVector();
    const Eigen::VectorXd rhs = theta * wp.AsVector() +
                                (1.0 - theta) * ApplyChannel(*w2, p)->AsVector();
    t.Expect((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12,
             [] { return std::string("mixture is not linear in the channel"); });
  }
  return t.Done();
}

VerifyCheck CheckPairwiseIdentity(int per_cell, uint64_t seed) {
  Tally t("pairwise_identity");
  CounterRng rng(seed, 2);
  for (int k : {4, 8, 16}) {
    for (double eps : {0.05, 0.1, 0.3}) {
      absl::StatusOr<PerturbedFamily> family = PaninskiFamily(k, eps);
      if (!t.Require(family.status())) continue;
      for (int i = 0; i < per_cell; ++i) {
        const int m = 2 + static_cast<int>(rng() % 6);
        absl::StatusOr<Channel> w = RandomChannel(k, m, rng);
        if (!t.Require(w.status())) continue;
        absl::StatusOr<FluctuationReport> induced = InducedChi2Fluctuation(*w, *family);
        absl::StatusOr<HMatrix> h = ComputeHMatrix(*w);
        if (!t.Require(induced.status()) || !t.Require(h.status())) continue;
        t.Case();
        const double expected = 4 * eps * eps / k * h->nuclear();
        t.Expect(std::abs(induced->value - expected) <= 1e-10, [&] {
          return absl::StrCat("k=", k, " eps=", eps, ": ", induced->value, " vs ", expected);
        });
      }
    }
  }
  return t.Done();
}

VerifyCheck CheckNormBounds(int per_cell, uint64_t seed) {
  Tally t("norm_bounds");
  CounterRng rng(seed, 3);
  auto verify = [&](const Channel& w, const ConstraintSpec& spec) {
    absl::StatusOr<NormBoundCheck> check = VerifyNormBounds(w, spec);
    if (!t.Require(check.status())) return;
    t.Case();
    t.Expect(check->pass, [&] {
      return absl::StrCat(spec.ToString(), ": nuclear ", check->nuclear,
                          " frobenius^2 ", check->frobenius_sq);
    });
  };
  for (int bits : {1, 2, 3}) {
    for (int i = 0; i < per_cell; ++i) {
      const int k = 2 * (1 + static_cast<int>(rng() % 8));
      absl::StatusOr<Channel> w = RandomCommChannel(k, bits, rng);
      if (t.Require(w.status())) verify(*w, ConstraintSpec::Communication(bits));
    }
  }
  for (double rho : {0.1, 0.5, 1.0}) {
    for (int i = 0; i < per_cell; ++i) {
      const int k = 2 * (1 + static_cast<int>(rng() % 8));
      const int m = 2 + static_cast<int>(rng() % 5);
      absl::StatusOr<Channel> w = RandomLdpChannel(k, m, rho, rng);
      if (t.Require(w.status())) verify(*w, ConstraintSpec::Privacy(rho));
    }
  }
  absl::StatusOr<Channel> parity = ParityChannel(4);
  if (t.Require(parity.status())) {
    absl::StatusOr<HMatrix> h = ComputeHMatrix(*parity);
    if (t.Require(h.status())) {
      t.Case();
      t.Expect(std::abs(h->nuclear() - 2.0) <= 1e-12 &&
                   std::abs(h->frobenius_sq() - 4.0) <= 1e-12,
               [&] { return absl::StrCat("parity not tight: ", h->nuclear()); });
    }
  }
  return t.Done();
}

VerifyCheck CheckIngster(int instances, uint64_t seed) {
  Tally t("ingster_exactness_and_le_cam_chain");
  CounterRng rng(seed, 4);
  for (int i = 0; i < instances; ++i) {
    const int k = (i % 2 == 0) ? 2 : 4;
    const int n = 1 + (i / 2) % 3;
    const double eps = 0.02 + 0.4 * rng.Uniform();
    absl::StatusOr<PerturbedFamily> family = PaninskiFamily(k, eps);
    if (!t.Require(family.status())) continue;
    const bool raw = i % 5 == 0;
    std::vector<Channel> channels;
    for (int j = 0; j < n && !raw; ++j) {
      absl::StatusOr<Channel> w = RandomChannel(k, 2 + static_cast<int>(rng() % 3), rng);
      if (!t.Require(w.status())) break;
      channels.push_back(*std::move(w));
    }
    if (!raw && static_cast<int>(channels.size()) != n) continue;
    absl::StatusOr<Estimate> ingster =
        raw ? IngsterChi2(*family, n) : IngsterChi2(channels, *family);
    absl::StatusOr<MixtureStats> brute =
        raw ? BruteForceMixtureStats(std::nullopt, *family, n)
            : BruteForceMixtureStats(channels, *family, n);
    absl::StatusOr<FluctuationReport> decoupled =
        raw ? DecoupledFluctuation(*family, n)
            : InducedDecoupledFluctuation(channels, *family);
    if (!t.Require(ingster.status()) || !t.Require(brute.status()) ||
        !t.Require(decoupled.status())) {
      continue;
    }
    t.Case();
    t.Expect(std::abs(ingster->value - brute->chi2) <= 1e-9, [&] {
      return absl::StrCat("k=", k, " n=", n, ": ingster ", ingster->value, " vs ",
                          brute->chi2);
    });
    t.Expect(Le(brute->tv * brute->tv, brute->chi2) &&
                 Le(brute->chi2, std::expm1(decoupled->value)),
             [&] {
               return absl::StrCat("chain: tv=", brute->tv, " chi2=", brute->chi2,
                                   " dec=", decoupled->value);
             });
  }
  return t.Done();
}

VerifyCheck CheckChaos(int matrices, uint64_t seed) {
  Tally t("chaos_mgf_bound");
  CounterRng rng(seed, 5);
  for (int i = 0; i < matrices; ++i) {
    const int dim = 1 + static_cast<int>(rng() % 14);
    const int rank = 1 + static_cast<int>(rng() % dim);
    Eigen::MatrixXd a(dim, rank);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < rank; ++c) a(r, c) = 2.0 * rng.Uniform() - 1.0;
    }
    absl::StatusOr<HMatrix> h = HMatrix::FromEntries(a * a.transpose());
    if (!t.Require(h.status())) continue;
    for (double frac : {0.1, 0.3, 0.5, 0.7, 0.95}) {
      const double lambda = frac / (2.0 * h->spectral_radius());
      absl::StatusOr<ChaosMgf> mgf = ChaosMgfBound(*h, lambda);
      if (!t.Require(mgf.status())) continue;
      t.Case();
      t.Expect(mgf->valid && mgf->exact_log_mgf.has_value() &&
                   Le(*mgf->exact_log_mgf, mgf->bound),
               [&] {
                 return absl::StrCat("dim=", dim, " lambda=", lambda, ": exact ",
                                     mgf->exact_log_mgf.value_or(-1), " > ", mgf->bound);
               });
    }
  }
  return t.Done();
}

VerifyCheck CheckPaninskiValues(uint64_t) {
  Tally t("paninski_fluctuations");
  for (int k : {2, 4, 8, 12, 16, 24}) {
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.45}) {
      absl::StatusOr<PerturbedFamily> family = PaninskiFamily(k, eps);
      if (!t.Require(family.status())) continue;
      absl::StatusOr<FluctuationReport> chi2 = Chi2Fluctuation(*family);
      if (!t.Require(chi2.status())) continue;
      t.Case();
      t.Expect(chi2->value == 4 * eps * eps, [&] {
        return absl::StrCat("chi2 fluctuation ", chi2->value, " != 4 eps^2");
      });
      double previous = 0.0;
      for (int n : {1, 2, 5, 20}) {
        FluctuationOptions exhaustive;
        exhaustive.method = Method::kExhaustive;
        absl::StatusOr<FluctuationReport> closed = DecoupledFluctuation(*family, n);
        if (!t.Require(closed.status())) continue;
        t.Case();
        if (k / 2 <= 12) {
          absl::StatusOr<FluctuationReport> brute =
              DecoupledFluctuation(*family, n, exhaustive);
          if (!t.Require(brute.status())) continue;
          t.Expect(std::abs(closed->value - brute->value) <= 1e-10, [&] {
            return absl::StrCat("closed ", closed->value, " vs exhaustive ", brute->value);
          });
        }
        const double ceiling = 16.0 * n * n * std::pow(eps, 4) / k;
        t.Expect(Le(closed->value, ceiling), [&] {
          return absl::StrCat("Hoeffding ceiling: ", closed->value, " > ", ceiling);
        });
        t.Expect(closed->value >= previous, [] { return std::string("not monotone in n"); });
        previous = closed->value;
      }
    }
  }
  return t.Done();
}

VerifyCheck CheckAdversary(int per_k, uint64_t seed) {
  Tally t("maxmin_construction");
  CounterRng rng(seed, 6);
  for (int k : {8, 16, 32}) {
    for (int i = 0; i < per_k; ++i) {
      const int n = 1 + static_cast<int>(rng() % 4);
      std::vector<Channel> channels;
      for (int j = 0; j < n; ++j) {
        absl::StatusOr<Channel> w = RandomChannel(k, 2 + static_cast<int>(rng() % 4), rng);
        if (t.Require(w.status())) channels.push_back(*std::move(w));
      }
      AdversaryOptions options;
      options.seed = rng();
      absl::StatusOr<AdversaryResult> result =
          AdversarialPerturbation(channels, 0.02, options);
      if (!t.Require(result.status())) continue;
      t.Case();
      const AdversaryReport& r = result->report;
      t.Expect(Le(r.compressed_frobenius_sq, r.norm_relation_bound, 1e-9), [&] {
        return absl::StrCat("norm relation: ", r.compressed_frobenius_sq, " > ",
                            r.norm_relation_bound);
      });
      // One-sided 99% normal slack below 1/9.
      const double slack =
          2.326 * std::sqrt((1.0 / 9.0) * (8.0 / 9.0) / r.certificate->trials);
      t.Expect(r.certificate->alpha_hat >= 1.0 / 9.0 - slack,
               [&] { return absl::StrCat("alpha_hat ", r.certificate->alpha_hat); });
      const Eigen::MatrixXd vtv = result->basis.v.transpose() * result->basis.v;
      t.Expect((vtv - Eigen::MatrixXd::Identity(vtv.rows(), vtv.cols()))
                       .cwiseAbs()
                       .maxCoeff() <= 1e-9,
               [] { return std::string("V is not orthonormal"); });
      if (r.within_validity_regime) {
        t.Expect(Le(r.achieved.value, r.ceiling), [&] {
          return absl::StrCat("ceiling: ", r.achieved.value, " > ", r.ceiling);
        });
      }
    }
  }
  absl::StatusOr<Channel> parity = ParityChannel(4);
  if (t.Require(parity.status())) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<Channel> channels(n, *parity);
      absl::StatusOr<AdversaryResult> result = AdversarialPerturbation(channels, 0.05);
      if (!t.Require(result.status())) continue;
      absl::StatusOr<MixtureStats> stats =
          BruteForceMixtureStats(channels, result->family, n);
      if (!t.Require(stats.status())) continue;
      t.Case();
      t.Expect(std::abs(result->report.achieved.value) <= 1e-12 &&
                   std::abs(stats->tv) <= 1e-12,
               [&] {
                 return absl::StrCat("parity n=", n, ": fluctuation ",
                                     result->report.achieved.value, " tv ", stats->tv);
               });
    }
  }
  return t.Done();
}

VerifyCheck CheckBounds(uint64_t) {
  Tally t("lower_bounds");
  absl::StatusOr<std::vector<BoundReport>> cells = LbTable(256, 0.1, 1, 1.0);
  if (t.Require(cells.status())) {
    t.Case();
    const double expected[] = {3276800.0, 256.0 / (0.01 * std::sqrt(2.0)), 204800.0};
    for (int i = 0; i < 3; ++i) {
      t.Expect(std::abs((*cells)[i].value - expected[i]) <= 1e-6 * expected[i], [&] {
        return absl::StrCat(BoundTaskName((*cells)[i].task), ": ", (*cells)[i].value);
      });
    }
    for (const BoundReport& cell : *cells) {
      absl::StatusOr<BoundReport> general =
          LbGeneral(cell.task, 256, 0.1, cell.sup_nuclear, cell.sup_frobenius);
      if (!t.Require(general.status())) continue;
      t.Expect(general->value == cell.value,
               [] { return std::string("table cell differs from the general bound"); });
    }
  }
  for (int k = 12; k <= 240; k += 12) {
    absl::StatusOr<double> ball = HammingBallLog2(k / 2, k / 6);
    if (!t.Require(ball.status())) continue;
    t.Case();
    t.Expect(*ball <= (k / 2) * BinaryEntropy(1.0 / 3.0) + 1e-12,
             [&] { return absl::StrCat("lattice condition fails at k=", k); });
  }
  return t.Done();
}

VerifyCheck CheckSimulator(bool quick, uint64_t seed) {
  Tally t("simulator");
  absl::StatusOr<Channel> parity = ParityChannel(4);
  absl::StatusOr<PerturbedFamily> family = PaninskiFamily(4, 0.3);
  if (!t.Require(parity.status()) || !t.Require(family.status())) return t.Done();
  ProtocolConfig cfg;
  cfg.n = 2;
  cfg.seed = seed;
  cfg.rule.assignments.push_back({{*parity, *parity}, 1.0});
  const int64_t trials = quick ? 2000 : 10000;
  absl::StatusOr<TrialReport> a = SimulateSmp(cfg, family->nominal(), *family, trials);
  absl::StatusOr<TrialReport> b = SimulateSmp(cfg, family->nominal(), *family, trials);
  if (!t.Require(a.status()) || !t.Require(b.status())) return t.Done();
  t.Case();
  t.Expect(a->null_counts == b->null_counts && a->alt_counts == b->alt_counts &&
               a->empirical_tv == b->empirical_tv,
           [] { return std::string("same seed gave different reports"); });
  t.Expect(a->exact_tv.has_value() &&
               std::abs(a->empirical_tv - *a->exact_tv) <= 4 * a->empirical_tv_stderr,
           [&] {
             return absl::StrCat("empirical ", a->empirical_tv, " vs exact ",
                                 a->exact_tv.value_or(-1));
           });
  absl::StatusOr<SeparationDemo> demo = RunSeparationDemo(8, 2, 0.03);
  if (t.Require(demo.status())) {
    t.Case();
    t.Expect(demo->separated, [&] {
      return absl::StrCat("private ", demo->private_best_tv, " vs public ", demo->public_tv);
    });
  }
  return t.Done();
}

}  // namespace

VerifyResult RunVerification(bool quick, uint64_t seed) {
  VerifyResult result;
  result.checks.push_back(CheckDivergences(quick ? 200 : 1000, seed));
  result.checks.push_back(CheckPairwiseIdentity(quick ? 5 : 25, seed));
  result.checks.push_back(CheckNormBounds(quick ? 100 : 1000, seed));
  result.checks.push_back(CheckIngster(quick ? 18 : 60, seed));
  result.checks.push_back(CheckChaos(quick ? 60 : 1000, seed));
  result.checks.push_back(CheckPaninskiValues(seed));
  result.checks.push_back(CheckAdversary(quick ? 2 : 8, seed));
  result.checks.push_back(CheckBounds(seed));
  result.checks.push_back(CheckSimulator(quick, seed));
  result.all_pass = true;
  for (const VerifyCheck& c : result.checks) result.all_pass = result.all_pass && c.pass;
  return result;
}

}  // namespace chicontract
