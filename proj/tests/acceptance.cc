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

// Acceptance run: one PASS/FAIL line per criterion, each checked against the
// test-side oracles in oracles.h where one exists. Exits nonzero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "chicontract/adversary.h"
#include "chicontract/bounds.h"
#include "chicontract/channels.h"
#include "chicontract/contraction.h"
#include "chicontract/fluctuation.h"
#include "chicontract/perturbation.h"
#include "chicontract/prob.h"
#include "chicontract/simulation.h"
#include "oracles.h"

namespace chicontract {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(std::string why) {
    if (pass) detail = std::move(why);
    pass = false;
  }
  template <typename T>
  T Must(absl::StatusOr<T> v) {
    if (!v.ok()) {
      Fail(std::string(v.status().message()));
      throw std::runtime_error(std::string(v.status().message()));
    }
    return *std::move(v);
  }
};

Channel ToChannel(const oracle::Matrix& w) {
  absl::StatusOr<Channel> c = Channel::Create(w);
  if (!c.ok()) throw std::runtime_error(std::string(c.status().message()));
  return *std::move(c);
}

// State shared between criteria 1 and 7.
struct IngsterInstance {
  double tv = 0.0;
  double chi2 = 0.0;
  double decoupled = 0.0;
};
std::vector<IngsterInstance> g_ingster_instances;

Outcome Criterion1(std::string& summary) {
  Outcome out;
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  double max_err = 0.0;
  for (int k : {2, 4}) {
    for (int n = 1; n <= 3; ++n) {
      for (int family_kind = 0; family_kind < 3; ++family_kind) {
        for (int mode = 0; mode < 4; ++mode) {
          const oracle::Vec q(k, 1.0 / k);
          double s = 0.0;
          std::vector<oracle::Vec> atoms;
          std::optional<PerturbedFamily> family;
          if (family_kind < 2) {
            const double eps = family_kind == 0 ? 0.1 : 0.22;
            s = 2 * eps;
            family = out.Must(PaninskiFamily(k, eps));
          } else {
            // General family with a random linear parameter law Z = V Y.
            oracle::Matrix v(k / 2, 1 + static_cast<int>(gen() % (k / 2)));
            for (int a = 0; a < v.rows(); ++a) {
              for (int b = 0; b < v.cols(); ++b) v(a, b) = unif(gen) - 1.0;
            }
            v /= v.cols();
            const double c = 1.5, eps = 0.2;
            s = c * eps;
            atoms = oracle::LinearAtoms(v);
            family = out.Must(GeneralFamily(Distribution::Uniform(k), c, eps, ZetaLaw::Linear(v)));
          }
          // mode 0: raw samples; 1: identity; 2: random; 3: random with identity.
          std::vector<oracle::Matrix> mats;
          if (mode == 1) mats.assign(n, oracle::Matrix::Identity(k, k));
          if (mode >= 2) {
            for (int j = 0; j < n; ++j) {
              const int m = 2 + static_cast<int>(gen() % 3);
              mats.push_back(mode == 3 && j == 0 ? oracle::Matrix::Identity(k, k)
                                                 : oracle::RandomStochastic(m, k, gen));
            }
          }
          std::vector<Channel> channels;
          for (const oracle::Matrix& w : mats) channels.push_back(ToChannel(w));

          Estimate ingster = mats.empty() ? out.Must(IngsterChi2(*family, n))
                                          : out.Must(IngsterChi2(channels, *family));
          MixtureStats brute =
              mats.empty() ? out.Must(BruteForceMixtureStats(std::nullopt, *family, n))
                           : out.Must(BruteForceMixtureStats(channels, *family, n));
          const oracle::Mixture raw = oracle::BruteMixture(mats, n, q, s, atoms);
          const double err = std::max({std::abs(ingster.value - brute.chi2),
                                       std::abs(brute.chi2 - raw.chi2),
                                       std::abs(brute.tv - raw.tv)});
          max_err = std::max(max_err, err);
          if (err > 1e-9) {
            out.Fail(absl::StrCat("k=", k, " n=", n, " family=", family_kind, " mode=", mode,
                                  ": ingster ", ingster.value, " brute ", brute.chi2,
                                  " oracle ", raw.chi2));
          }
          const double decoupled =
              mats.empty() ? out.Must(DecoupledFluctuation(*family, n)).value
                           : out.Must(InducedDecoupledFluctuation(channels, *family)).value;
          g_ingster_instances.push_back({brute.tv, brute.chi2, decoupled});
        }
      }
    }
  }
  summary = absl::StrCat(g_ingster_instances.size(), " instances, max |err| ", max_err);
  return out;
}

Outcome Criterion2(std::string& summary) {
  Outcome out;
  std::mt19937_64 gen(202);
  int count = 0;
  double max_err = 0.0;
  for (int k : {4, 8, 16}) {
    for (double eps : {0.05, 0.1, 0.3}) {
      for (int i = 0; i < 25; ++i) {
        const int m = 2 + static_cast<int>(gen() % 7);
        const oracle::Matrix w = oracle::RandomStochastic(m, k, gen);
        const PerturbedFamily family = out.Must(PaninskiFamily(k, eps));
        const FluctuationReport r = out.Must(InducedChi2Fluctuation(ToChannel(w), family));
        const double expected = 4 * eps * eps / k * oracle::Nuclear(oracle::DirectH(w));
        const double err = std::abs(r.value - expected);
        max_err = std::max(max_err, err);
        if (err > 1e-10) {
          out.Fail(absl::StrCat("k=", k, " eps=", eps, ": ", r.value, " vs ", expected));
        }
        ++count;
      }
    }
  }
  summary = absl::StrCat(count, " channels, max |err| ", max_err);
  return out;
}

Outcome Criterion3(std::string& summary) {
  Outcome out;
  std::mt19937_64 gen(303);
  int count = 0;
  double worst = 0.0;  // largest norm / bound ratio seen
  auto check = [&](const oracle::Matrix& w, double nuc_bound, double frob_bound,
                   const std::string& what) {
    const oracle::Matrix h = oracle::DirectH(w);
    const double nuc = oracle::Nuclear(h), frob = oracle::FrobeniusSq(h);
    worst = std::max({worst, nuc / nuc_bound, frob / frob_bound});
    if (nuc > nuc_bound * (1 + 1e-12) || frob > frob_bound * (1 + 1e-12)) {
      out.Fail(absl::StrCat(what, ": nuclear ", nuc, " frobenius_sq ", frob));
    }
    ++count;
  };
  for (int bits : {1, 2, 3}) {
    const double nb = std::ldexp(1.0, bits), fb = std::ldexp(1.0, bits + 1);
    for (int i = 0; i < 1000; ++i) {
      const int k = 2 << (i % 4);  // 2..16
      oracle::Matrix w;
      if (i % 2 == 0) {
        CounterRng rng(303, i);
        w = out.Must(RandomCommChannel(k, bits, rng)).matrix();
      } else {
        w = oracle::RandomStochastic(1 << bits, k, gen);
      }
      if (w.rows() > (1 << bits)) out.Fail("comm generator exceeded its output budget");
      check(w, nb, fb, absl::StrCat("comm bits=", bits));
    }
  }
  for (double rho : {0.1, 0.5, 1.0}) {
    const double nb = 0.5 * std::pow(std::expm1(rho), 2);
    for (int i = 0; i < 1000; ++i) {
      const int k = 2 << (i % 4);
      const int m = 2 + static_cast<int>(gen() % 6);
      oracle::Matrix w;
      if (i % 2 == 0) {
        CounterRng rng(304, i);
        w = out.Must(RandomLdpChannel(k, m, rho, rng)).matrix();
      } else {
        w = oracle::RandomLdp(k, m, rho, gen);
      }
      const LdpCheck ldp = CheckLdp(ToChannel(w), rho);
      if (!ldp.satisfied) {
        out.Fail(absl::StrCat(i % 2 == 0 ? "library" : "oracle", " LDP channel at rho=", rho,
                              " has ratio ", ldp.worst_ratio));
      }
      check(w, nb, std::numeric_limits<double>::infinity(), absl::StrCat("ldp rho=", rho));
    }
  }
  for (int k : {4, 8, 16}) {
    const oracle::Matrix w = out.Must(ParityChannel(k)).matrix();
    const oracle::Matrix h = oracle::DirectH(w);
    if (std::abs(oracle::Nuclear(h) - 2.0) > 1e-12 ||
        std::abs(oracle::FrobeniusSq(h) - 4.0) > 1e-12) {
      out.Fail(absl::StrCat("parity k=", k, " does not saturate"));
    }
    const HMatrix lib = out.Must(ComputeHMatrix(ToChannel(w)));
    if (std::abs(lib.nuclear() - 2.0) > 1e-12 || std::abs(lib.frobenius_sq() - 4.0) > 1e-12) {
      out.Fail(absl::StrCat("library parity norms k=", k));
    }
  }
  summary = absl::StrCat(count, " channels + parity, worst norm/bound ", worst);
  return out;
}

Outcome Criterion4(std::string& summary) {
  Outcome out;
  std::mt19937_64 gen(404);
  std::normal_distribution<double> normal;
  int count = 0, oracle_checks = 0;
  double max_ratio = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + i % 14;
    const int r = 1 + static_cast<int>(gen() % d);
    oracle::Matrix g(d, r);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < r; ++b) g(a, b) = normal(gen);
    }
    const HMatrix h = out.Must(HMatrix::FromEntries(g * g.transpose()));
    for (double frac : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      const double lambda = frac / (2 * h.spectral_radius());
      const ChaosMgf mgf = out.Must(ChaosMgfBound(h, lambda));
      if (!mgf.valid || !mgf.exact_log_mgf.has_value()) {
        out.Fail("bound not valid inside its regime");
        continue;
      }
      if (*mgf.exact_log_mgf > mgf.bound * (1 + 1e-12) + 1e-15) {
        out.Fail(absl::StrCat("dim ", d, " lambda ", lambda, ": ", *mgf.exact_log_mgf, " > ",
                              mgf.bound));
      }
      if (mgf.bound > 0) max_ratio = std::max(max_ratio, *mgf.exact_log_mgf / mgf.bound);
      if (d <= 10 && frac == 0.95) {
        const double ref = oracle::ChaosLogMgf(h.entries(), lambda);
        if (std::abs(ref - *mgf.exact_log_mgf) > 1e-9 * std::max(1.0, std::abs(ref))) {
          out.Fail(absl::StrCat("exact log-MGF ", *mgf.exact_log_mgf, " vs oracle ", ref));
        }
        ++oracle_checks;
      }
      ++count;
    }
  }
  summary = absl::StrCat(count, " (matrix, lambda) pairs, 0 violations required, ",
                         "max exact/bound ", max_ratio, ", ", oracle_checks,
                         " cross-checked against the oracle");
  return out;
}

Outcome Criterion5(std::string& summary) {
  Outcome out;
  std::mt19937_64 gen(505);
  int bases = 0;
  double min_alpha = 1.0;
  for (int k : {8, 16, 32}) {
    for (int i = 0; i < 4; ++i) {
      const int n = 1 + static_cast<int>(gen() % 4);
      std::vector<Channel> channels;
      oracle::Matrix hbar = oracle::Matrix::Zero(k / 2, k / 2);
      for (int j = 0; j < n; ++j) {
        const oracle::Matrix w = oracle::RandomStochastic(2 + static_cast<int>(gen() % 4), k, gen);
        hbar += oracle::DirectH(w) / n;
        channels.push_back(ToChannel(w));
      }
      AdversaryOptions options;
      options.seed = gen();
      options.certificate_trials = 10000;
      const AdversaryResult result = out.Must(AdversarialPerturbation(channels, 0.02, options));
      const oracle::Matrix& v = result.basis.v;
      // Relation checked from the oracle's own H-bar.
      const double lhs = oracle::FrobeniusSq(v.transpose() * hbar * v);
      const double rhs = 4.0 / k * std::pow(oracle::Nuclear(hbar), 2);
      if (lhs > rhs + 1e-9) out.Fail(absl::StrCat("norm relation: ", lhs, " > ", rhs));
      // V must span the bottom k/4 eigenvectors.
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<oracle::Matrix>(hbar).eigenvalues();
      const double bottom_sq = ev.head(k / 4).squaredNorm();
      if (std::abs(lhs - bottom_sq) > 1e-9 * std::max(1.0, bottom_sq)) {
        out.Fail(absl::StrCat("V^T H V is not the bottom block: ", lhs, " vs ", bottom_sq));
      }
      const AlmostPerturbationCheck& cert = *result.report.certificate;
      const double slack = 2.326 * std::sqrt((1.0 / 9) * (8.0 / 9) / cert.trials);
      min_alpha = std::min(min_alpha, cert.alpha_hat);
      if (cert.trials < 10000 || cert.alpha_hat < 1.0 / 9 - slack) {
        out.Fail(absl::StrCat("k=", k, ": empirical probability ", cert.alpha_hat));
      }
      ++bases;
    }
  }
  const Channel parity = out.Must(ParityChannel(4));
  for (int n = 1; n <= 3; ++n) {
    std::vector<Channel> channels(n, parity);
    const AdversaryResult result = out.Must(AdversarialPerturbation(channels, 0.05));
    const MixtureStats stats = out.Must(BruteForceMixtureStats(channels, result.family, n));
    if (std::abs(result.report.achieved.value) > 1e-12 || std::abs(stats.tv) > 1e-12) {
      out.Fail(absl::StrCat("parity n=", n, ": fluctuation ", result.report.achieved.value,
                            " tv ", stats.tv));
    }
    // The oracle agrees on the constructed family: V = (1, -1)/sqrt(2).
    const double s = result.family.scale() * result.basis.v(0, 0);
    const oracle::Vec q(4, 0.25);
    oracle::Vec member = oracle::Member(q, s, std::vector<int>{1, -1});
    const oracle::Vec out_alt = oracle::Apply(parity.matrix(), member);
    if (std::abs(out_alt[0] - 0.5) > 1e-15) out.Fail("parity output moved");
  }
  summary = absl::StrCat(bases, " bases, min empirical probability ", min_alpha,
                         ", parity n=1..3 exact zero");
  return out;
}

Outcome Criterion6(std::string& summary) {
  Outcome out;
  int count = 0;
  double max_err = 0.0;
  for (int k = 4; k <= 24; k += 4) {
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3, 0.45}) {
      const PerturbedFamily family = out.Must(PaninskiFamily(k, eps));
      const FluctuationReport chi2 = out.Must(Chi2Fluctuation(family));
      if (chi2.value != 4 * eps * eps) {
        out.Fail(absl::StrCat("chi2 ", chi2.value, " != ", 4 * eps * eps));
      }
      FluctuationOptions forced;
      forced.method = Method::kExhaustive;
      const double chi2_exh = out.Must(Chi2Fluctuation(family, forced)).value;
      if (std::abs(chi2_exh - 4 * eps * eps) > 1e-12) out.Fail("chi2 enumeration disagrees");
      for (int n : {1, 2, 5, 10, 50, 100}) {
        const FluctuationReport closed = out.Must(DecoupledFluctuation(family, n));
        const FluctuationReport exh = out.Must(DecoupledFluctuation(family, n, forced));
        const double err = std::abs(closed.value - exh.value);
        max_err = std::max(max_err, err / std::max(1.0, std::abs(exh.value)));
        if (closed.method != Method::kClosedForm || exh.method != Method::kExhaustive ||
            err > 1e-10 * std::max(1.0, std::abs(exh.value))) {
          out.Fail(absl::StrCat("k=", k, " eps=", eps, " n=", n, ": closed ", closed.value,
                                " exhaustive ", exh.value));
        }
        const double ceiling = 16.0 * n * n * std::pow(eps, 4) / k;
        if (closed.value > ceiling) {
          out.Fail(absl::StrCat("Hoeffding ceiling: ", closed.value, " > ", ceiling));
        }
        if (k <= 8) {
          std::vector<oracle::Matrix> mats(n, oracle::Matrix::Identity(k, k));
          const double ref = oracle::BruteDecoupled(mats, oracle::Vec(k, 1.0 / k), 2 * eps);
          if (std::abs(ref - closed.value) > 1e-9 * std::max(1.0, std::abs(ref))) {
            out.Fail(absl::StrCat("oracle decoupled ", ref, " vs ", closed.value));
          }
        }
        ++count;
      }
    }
  }
  summary = absl::StrCat(count, " grid points, max closed-vs-exhaustive err ", max_err);
  return out;
}

Outcome Criterion7(std::string& summary) {
  Outcome out;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const IngsterInstance& inst : g_ingster_instances) {
    const double upper = std::expm1(inst.decoupled);
    if (inst.tv * inst.tv > inst.chi2 + 1e-12 || inst.chi2 > upper + 1e-12) {
      out.Fail(absl::StrCat("tv^2 ", inst.tv * inst.tv, " chi2 ", inst.chi2, " exp-1 ", upper));
    }
    min_slack = std::min(min_slack, upper - inst.chi2);
  }
  if (g_ingster_instances.empty()) out.Fail("criterion 1 produced no instances");
  summary = absl::StrCat(g_ingster_instances.size(), " instances, min upper slack ", min_slack);
  return out;
}

Outcome Criterion8(std::string& summary) {
  Outcome out;
  const std::vector<BoundReport> cells = out.Must(LbTable(256, 0.1, 1, std::nullopt));
  const double expected[] = {3276800.0, 256.0 / (0.01 * std::sqrt(2.0)), 204800.0};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(cells[i].value - expected[i]) > 1e-6 * expected[i]) {
      out.Fail(absl::StrCat(BoundTaskName(cells[i].task), ": ", cells[i].value));
    }
  }
  if (std::abs(cells[1].value - 18102) > 1) out.Fail("testing_public is not ~18,102");
  // Centralized orders from the identity channel's norms.
  double ratio_lo = 1e300, ratio_hi = 0;
  for (int k : {16, 64, 256}) {
    for (double eps : {0.05, 0.1, 0.2}) {
      const oracle::Matrix h = oracle::DirectH(oracle::Matrix::Identity(k, k));
      const double nuc = oracle::Nuclear(h), frob = std::sqrt(oracle::FrobeniusSq(h));
      const double learn = out.Must(LbGeneral(BoundTask::kLearning, k, eps, nuc, frob)).value;
      if (std::abs(learn - k / (eps * eps)) > 1e-9 * learn) {
        out.Fail(absl::StrCat("learning at k=", k, ": ", learn));
      }
      for (BoundTask task : {BoundTask::kTestingPublic, BoundTask::kTestingPrivate}) {
        const double v = out.Must(LbGeneral(task, k, eps, nuc, frob)).value;
        const double ratio = v / (std::sqrt(k) / (eps * eps));
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
      }
    }
  }
  // Testing orders match sqrt(k)/eps^2 up to a fixed constant factor.
  if (ratio_lo < 0.5 || ratio_hi > 1.0 + 1e-12) {
    out.Fail(absl::StrCat("testing ratio to sqrt(k)/eps^2 in [", ratio_lo, ", ", ratio_hi, "]"));
  }
  summary = absl::StrCat("cells ", cells[0].value, " / ", cells[1].value, " / ", cells[2].value,
                         "; identity testing ratio in [", ratio_lo, ", ", ratio_hi, "]");
  return out;
}

Outcome Criterion9(std::string& summary) {
  Outcome out;
  const Channel parity = out.Must(ParityChannel(4));
  const PerturbedFamily family = out.Must(PaninskiFamily(4, 0.3));
  // Exact TV from the oracle: parity outputs with the Paninski mixture.
  const oracle::Mixture exact = oracle::BruteMixture(
      {parity.matrix(), parity.matrix()}, 2, oracle::Vec(4, 0.25), 0.6);
  int agree = 0;
  bool reproducible = true;
  for (int rep = 0; rep < 100; ++rep) {
    ProtocolConfig cfg;
    cfg.n = 2;
    cfg.seed = 9000 + rep;
    cfg.rule.assignments.push_back({{parity, parity}, 1.0});
    const TrialReport a = out.Must(SimulateSmp(cfg, family.nominal(), family, 10000));
    if (rep < 5) {
      const TrialReport b = out.Must(SimulateSmp(cfg, family.nominal(), family, 10000));
      reproducible = reproducible && a.null_counts == b.null_counts &&
                     a.alt_counts == b.alt_counts &&
                     std::memcmp(&a.empirical_tv, &b.empirical_tv, sizeof(double)) == 0;
    }
    const BayesError be = out.Must(ExactProtocolBayesError(cfg, family.nominal(), family));
    if (std::abs(be.tv - exact.tv) > 1e-12) out.Fail("exact_bayes_error disagrees with oracle");
    if (std::abs(a.empirical_tv - be.tv) <= 3 * a.empirical_tv_stderr) ++agree;
  }
  if (!reproducible) out.Fail("same seed gave different reports");
  if (agree < 99) out.Fail(absl::StrCat("only ", agree, "/100 within 3 stderr"));
  summary = absl::StrCat(agree, "/100 within 3 stderr of exact tv ", exact.tv,
                         ", reproducible=", reproducible);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome(std::string&)> run;
};

}  // namespace
}  // namespace chicontract

int main() {
  using chicontract::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "ingster_exactness", 30, chicontract::Criterion1},
      {2, "pairwise_identity", 10, chicontract::Criterion2},
      {3, "norm_bounds", 60, chicontract::Criterion3},
      {4, "chaos_mgf_bound", 60, chicontract::Criterion4},
      {5, "maxmin_construction", 60, chicontract::Criterion5},
      {6, "fluctuation_values", 30, chicontract::Criterion6},
      {7, "le_cam_chain", 1, chicontract::Criterion7},
      {8, "table_reproduction", 1, chicontract::Criterion8},
      {9, "simulator_fidelity", 120, chicontract::Criterion9},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string summary;
    chicontract::Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      outcome = c.run(summary);
    } catch (const std::exception& e) {
      outcome.Fail(e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      outcome.Fail(absl::StrCat("runtime ", seconds, " s over budget ", c.budget_seconds, " s"));
    }
    std::printf("%s %d %s (%.2f s): %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                seconds, outcome.pass ? summary.c_str() : outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
