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

#ifndef CHICONTRACT_CONTRACTION_H_
#define CHICONTRACT_CONTRACTION_H_

#include <span>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "chicontract/channels.h"
#include "chicontract/prob.h"

namespace chicontract {

// Largest input alphabet accepted by the dense eigensolver path.
inline constexpr int kMaxHMatrixAlphabet = 1 << 12;

// A symmetric positive semidefinite (k/2) x (k/2) matrix together with its
// spectrum. For a channel W,
//
//   H(W)_{i1,i2} = sum_y (W(y|2i1-1) - W(y|2i1)) (W(y|2i2-1) - W(y|2i2))
//                        / sum_x W(y|x),
//
// which measures how well the channel output separates the two members of
// each input pair.
class HMatrix {
 public:
  // Symmetrizes `entries` and diagonalizes it. Fails if the input is not
  // symmetric within 1e-10 or has an eigenvalue below -1e-9.
  static absl::StatusOr<HMatrix> FromEntries(Eigen::MatrixXd entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  // Ascending; magnitudes below 1e-12 are clamped to zero.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  // Orthonormal columns matching eigenvalues().
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

  double nuclear() const { return nuclear_; }
  double frobenius() const { return frobenius_; }
  double frobenius_sq() const { return frobenius_ * frobenius_; }
  double spectral_radius() const { return spectral_radius_; }
  double trace() const { return entries_.trace(); }
  int rank() const { return rank_; }

 private:
  HMatrix() = default;

  Eigen::MatrixXd entries_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double nuclear_ = 0.0;
  double frobenius_ = 0.0;
  double spectral_radius_ = 0.0;
  int rank_ = 0;
};

// H(W). Outputs with sum_x W(y|x) = 0 contribute nothing.
absl::StatusOr<HMatrix> ComputeHMatrix(const Channel& w);

// The raw entries of H(W) without diagonalization.
absl::StatusOr<Eigen::MatrixXd> HMatrixEntries(const Channel& w);

// Entrywise mean of H(W_j) over the sequence.
absl::StatusOr<HMatrix> AverageHMatrix(std::span<const Channel> channels);

struct NormBoundCheck {
  ConstraintSpec spec;
  double nuclear = 0.0;
  double frobenius_sq = 0.0;
  double bound_nuclear = 0.0;
  double bound_frobenius_sq = 0.0;
  bool pass = false;
  // rho > 1: the privacy bound is outside its stated regime.
  bool outside_regime = false;
};

// Checks ||H(W)||_* <= 2^l and ||H(W)||_F^2 <= 2^(l+1) for l-bit channels, or
// ||H(W)||_* <= (e^rho - 1)^2 / 2 and ||H(W)||_F^2 <= ||H(W)||_*^2 for
// rho-LDP channels. Fails with FailedPrecondition if `w` does not satisfy the
// constraint.
absl::StatusOr<NormBoundCheck> VerifyNormBounds(const Channel& w,
                                                const ConstraintSpec& spec);

// Norm suprema over a constraint family: {nuclear, frobenius_sq}.
struct NormSuprema {
  double nuclear;
  double frobenius_sq;
};
NormSuprema ConstraintNormBounds(const ConstraintSpec& spec);

}  // namespace chicontract

#endif  // CHICONTRACT_CONTRACTION_H_
