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

#ifndef CHICONTRACT_ADVERSARY_H_
#define CHICONTRACT_ADVERSARY_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "chicontract/contraction.h"
#include "chicontract/fluctuation.h"
#include "chicontract/perturbation.h"
#include "chicontract/prob.h"

namespace chicontract {

// 12 sqrt(2): with this scale, ||Z||_1 >= k / c is exactly d_TV(p_Z, u) >= eps.
inline const double kAdversaryScale = 12.0 * std::sqrt(2.0);

// The k/4 eigenvectors of Hbar with the smallest eigenvalues.
struct AdversaryBasis {
  Eigen::MatrixXd v;            // (k/2) x (k/4), orthonormal columns
  Eigen::VectorXd eigenvalues;  // full spectrum of Hbar, ascending
  double c = kAdversaryScale;

  // V^T Hbar V.
  Eigen::MatrixXd Compressed(const Eigen::MatrixXd& hbar) const;
};

// Columns follow the solver's ascending order; each column is signed so that
// its first entry of largest magnitude is positive, then the block is
// re-orthogonalized.
absl::StatusOr<AdversaryBasis> AdversarialBasis(const HMatrix& hbar,
                                                double c = kAdversaryScale);

struct AdversaryOptions {
  double c = kAdversaryScale;
  // Constant of the validity regime n <= C k^{3/2} / (eps^2 max ||H(W)||_*);
  // defaults to 1 / (8 c^2) when unset.
  std::optional<double> validity_constant;
  int64_t certificate_trials = 10000;
  uint64_t seed = 0;
  FluctuationOptions fluctuation;
};

struct AdversaryReport {
  FluctuationReport achieved;
  // Absent when eps = 0.
  std::optional<AlmostPerturbationCheck> certificate;
  // Fraction of parameter atoms (or draws) whose p_Z leaves the simplex.
  double invalid_rate = 0.0;
  bool invalid_rate_exact = false;
  // 8 c^4 n^2 eps^4 (tr Hbar)^2 / (3 k^3), a ceiling on the log-MGF.
  double ceiling = 0.0;
  double max_nuclear = 0.0;
  double validity_constant = 0.0;
  bool within_validity_regime = false;
  // ||V^T Hbar V||_F^2 and (4/k) ||Hbar||_*^2.
  double compressed_frobenius_sq = 0.0;
  double norm_relation_bound = 0.0;
};

struct AdversaryResult {
  PerturbedFamily family;
  AdversaryBasis basis;
  AdversaryReport report;
};

// Builds the family (1 +- c eps (VY)_i)/k around the uniform distribution
// for Y uniform on {-1,+1}^{k/4}.
absl::StatusOr<AdversaryResult> AdversarialPerturbation(
    std::span<const Channel> channels, double eps,
    const AdversaryOptions& options = {});

struct MaxminGap {
  double paninski_value = 0.0;
  double adversarial_value = 0.0;
  // adversarial / paninski; 0 when both vanish.
  double ratio = 0.0;
};

// Compares the induced decoupled fluctuation of the Paninski family with that
// of the bottom-eigenspace family at the same scale 2 eps, so that only the
// direction of the perturbation differs.
absl::StatusOr<MaxminGap> ComputeMaxminGap(std::span<const Channel> channels,
                                           double eps,
                                           const FluctuationOptions& options = {});

}  // namespace chicontract

#endif  // CHICONTRACT_ADVERSARY_H_
