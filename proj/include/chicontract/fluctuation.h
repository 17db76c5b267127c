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

#ifndef CHICONTRACT_FLUCTUATION_H_
#define CHICONTRACT_FLUCTUATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "chicontract/contraction.h"
#include "chicontract/perturbation.h"
#include "chicontract/prob.h"

namespace chicontract {

enum class FluctuationKind {
  kChiSquare,          // E_Z chi2(p_Z, q)
  kDecoupled,          // log E_{ZZ'} exp(n <delta_Z, delta_Z'>)
  kInducedChiSquare,   // E_Z chi2(W o p_Z, W o q)
  kInducedDecoupled,   // log E_{ZZ'} exp(sum_j <delta_Z^{W_j}, delta_Z'^{W_j}>)
};

enum class Method { kClosedForm, kExhaustive, kMonteCarlo };

const char* FluctuationKindName(FluctuationKind kind);
const char* MethodName(Method method);

// A scalar computed exactly or estimated.
struct Estimate {
  double value = 0.0;
  Method method = Method::kExhaustive;
  std::optional<double> mc_stderr;
};

struct FluctuationReport {
  FluctuationKind kind;
  double value = 0.0;
  Method method = Method::kExhaustive;
  std::optional<double> mc_stderr;
  int n = 1;
  std::string family_id;
  std::vector<std::string> channel_ids;
};

struct FluctuationOptions {
  // Samples used whenever exact evaluation is out of reach.
  int64_t mc_samples = 1 << 16;
  uint64_t seed = 0;
  // Forces a method when it is applicable (closed forms exist only for
  // Rademacher laws; exhaustive needs a linear law with latent dim <= 20).
  std::optional<Method> method;
  // Per-channel labels copied into reports.
  std::vector<std::string> channel_ids;
};

absl::StatusOr<FluctuationReport> Chi2Fluctuation(
    const PerturbedFamily& family, const FluctuationOptions& options = {});

absl::StatusOr<FluctuationReport> InducedChi2Fluctuation(
    const Channel& w, const PerturbedFamily& family,
    const FluctuationOptions& options = {});

absl::StatusOr<FluctuationReport> DecoupledFluctuation(
    const PerturbedFamily& family, int n, const FluctuationOptions& options = {});

// Evaluated as log E exp(lambda Z^T Hbar Z') with lambda = n scale^2 / k; for
// linear laws Z = VY the inner expectation over Y' collapses to
// prod_j cosh(lambda (V^T Hbar V Y)_j).
absl::StatusOr<FluctuationReport> InducedDecoupledFluctuation(
    std::span<const Channel> channels, const PerturbedFamily& family,
    const FluctuationOptions& options = {});

// chi2(E_Z[prod_j W_j o p_Z], prod_j W_j o q) through Ingster's identity
// E_{ZZ'} prod_j (1 + <delta_Z^{W_j}, delta_Z'^{W_j}>) - 1. Exact over all
// pairs of atoms when there are at most 2^24 pairs.
absl::StatusOr<Estimate> IngsterChi2(std::span<const Channel> channels,
                                     const PerturbedFamily& family,
                                     const FluctuationOptions& options = {});
// Unconstrained players: n direct samples from p_Z.
absl::StatusOr<Estimate> IngsterChi2(const PerturbedFamily& family, int n,
                                     const FluctuationOptions& options = {});

struct MixtureStats {
  double chi2 = 0.0;
  double tv = 0.0;
};

// Materializes the n-player mixture E_Z[prod_j W_j o p_Z] and the nominal
// product, and returns their exact chi-square and total variation distances.
// Without channels the players see their samples directly. Needs an
// exhaustive law whose atoms are all valid distributions.
absl::StatusOr<MixtureStats> BruteForceMixtureStats(
    std::optional<std::span<const Channel>> channels,
    const PerturbedFamily& family, int n, int64_t state_cap = kDefaultStateCap);

// Same, against an explicit nominal input law (used by the simulator when the
// null arm is not the family's centre).
absl::StatusOr<MixtureStats> BruteForceMixtureStatsAgainst(
    std::optional<std::span<const Channel>> channels,
    const PerturbedFamily& family, const Distribution& null_input, int n,
    int64_t state_cap = kDefaultStateCap);

struct ChaosMgf {
  // log E_{theta theta'} exp(lambda theta^T H theta'); absent when dim > 20.
  std::optional<double> exact_log_mgf;
  // (lambda^2 / 2) ||H||_F^2 / (1 - 4 lambda^2 rho(H)^2), or infinity.
  double bound = 0.0;
  // lambda < 1 / (2 rho(H)).
  bool valid = false;
};

absl::StatusOr<ChaosMgf> ChaosMgfBound(const HMatrix& h, double lambda);

// log E exp(lambda Y^T M Y') for independent uniform Y, Y' in {-1,+1}^r and a
// symmetric M, computed as log E_Y prod_j cosh(lambda (M Y)_j). Enumerates Y
// when r <= 20 (or when forced), otherwise averages `mc_samples` draws.
absl::StatusOr<Estimate> LogRademacherChaosMgf(
    const Eigen::MatrixXd& m, double lambda,
    const FluctuationOptions& options = {});

// log cosh(x) without overflow.
double LogCosh(double x);

}  // namespace chicontract

#endif  // CHICONTRACT_FLUCTUATION_H_
