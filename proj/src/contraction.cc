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

#include "chicontract/contraction.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace chicontract {
namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kPsdTolerance = 1e-9;
constexpr double kEigenClamp = 1e-12;
// Tight cases (parity at l = 1) hit the bound up to rounding.
constexpr double kBoundRelativeSlack = 1e-12;

bool WithinBound(double value, double bound) {
  return value <= bound + kBoundRelativeSlack * std::max(1.0, std::abs(bound));
}

absl::Status CheckHMatrixChannel(const Channel& w) {
  if (w.k() % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("H(W) needs an even input alphabet, got k=", w.k()));
  }
  if (w.k() > kMaxHMatrixAlphabet) {
    return absl::InvalidArgumentError(
        absl::StrCat("k=", w.k(), " exceeds the dense limit ", kMaxHMatrixAlphabet));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<HMatrix> HMatrix::FromEntries(Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    return absl::InvalidArgumentError("H must be a nonempty square matrix");
  }
  const double asymmetry = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > kSymmetryTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("matrix is not symmetric (max |H - H^T| = ", asymmetry, ")"));
  }
  HMatrix h;
  h.entries_ = 0.5 * (entries + entries.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.entries_);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("symmetric eigensolver did not converge");
  }
  h.eigenvalues_ = solver.eigenvalues();
  h.eigenvectors_ = solver.eigenvectors();
  if (h.eigenvalues_(0) < -kPsdTolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "matrix is not positive semidefinite (min eigenvalue ",
        h.eigenvalues_(0), ")"));
  }
  for (Eigen::Index i = 0; i < h.eigenvalues_.size(); ++i) {
    if (std::abs(h.eigenvalues_(i)) < kEigenClamp) h.eigenvalues_(i) = 0.0;
    if (h.eigenvalues_(i) != 0.0) ++h.rank_;
  }
  h.nuclear_ = h.eigenvalues_.cwiseAbs().sum();
  h.frobenius_ = h.entries_.norm();
  h.spectral_radius_ = h.eigenvalues_.cwiseAbs().maxCoeff();
  return h;
}

absl::StatusOr<Eigen::MatrixXd> HMatrixEntries(const Channel& w) {
  if (absl::Status s = CheckHMatrixChannel(w); !s.ok()) return s;
  const int half = w.k() / 2;
  const Eigen::MatrixXd& mat = w.matrix();
  // Row y of `scaled` is b_y = (W(y|2i-1) - W(y|2i))_i / sqrt(sum_x W(y|x)), so
  // H = sum_y b_y b_y^T.
  Eigen::MatrixXd scaled = Eigen::MatrixXd::Zero(w.m(), half);
  for (int y = 0; y < w.m(); ++y) {
    const double mass = mat.row(y).sum();
    if (mass <= 0.0) continue;
    const double inv_sqrt = 1.0 / std::sqrt(mass);
    for (int i = 0; i < half; ++i) {
      scaled(y, i) = (mat(y, 2 * i) - mat(y, 2 * i + 1)) * inv_sqrt;
    }
  }
  return Eigen::MatrixXd(scaled.transpose() * scaled);
}

absl::StatusOr<HMatrix> ComputeHMatrix(const Channel& w) {
  absl::StatusOr<Eigen::MatrixXd> entries = HMatrixEntries(w);
  if (!entries.ok()) return entries.status();
  return HMatrix::FromEntries(*std::move(entries));
}

absl::StatusOr<HMatrix> AverageHMatrix(std::span<const Channel> channels) {
  if (channels.empty()) return absl::InvalidArgumentError("no channels to average");
  const int k = channels.front().k();
  Eigen::MatrixXd sum;
  for (const Channel& w : channels) {
    if (w.k() != k) {
      return absl::InvalidArgumentError("channels disagree on input alphabet");
    }
    absl::StatusOr<Eigen::MatrixXd> entries = HMatrixEntries(w);
    if (!entries.ok()) return entries.status();
    if (sum.size() == 0) {
      sum = *std::move(entries);
    } else {
      sum += *entries;
    }
  }
  return HMatrix::FromEntries(sum / static_cast<double>(channels.size()));
}

NormSuprema ConstraintNormBounds(const ConstraintSpec& spec) {
  if (spec.kind == ConstraintSpec::Kind::kCommunication) {
    return {std::ldexp(1.0, spec.bits), std::ldexp(1.0, spec.bits + 1)};
  }
  const double nuclear = 0.5 * std::pow(std::expm1(spec.rho), 2);
  return {nuclear, nuclear * nuclear};
}

absl::StatusOr<NormBoundCheck> VerifyNormBounds(const Channel& w,
                                                const ConstraintSpec& spec) {
  if (absl::Status s = ValidateConstraint(spec); !s.ok()) return s;
  if (!SatisfiesConstraint(w, spec)) {
    return absl::FailedPreconditionError(
        absl::StrCat("channel does not satisfy ", spec.ToString()));
  }
  absl::StatusOr<HMatrix> h = ComputeHMatrix(w);
  if (!h.ok()) return h.status();
  NormBoundCheck check;
  check.spec = spec;
  check.nuclear = h->nuclear();
  check.frobenius_sq = h->frobenius_sq();
  const NormSuprema bounds = ConstraintNormBounds(spec);
  check.bound_nuclear = bounds.nuclear;
  check.bound_frobenius_sq = bounds.frobenius_sq;
  check.outside_regime = spec.OutsidePrivacyRegime();
  if (spec.kind == ConstraintSpec::Kind::kCommunication) {
    check.pass = WithinBound(check.nuclear, check.bound_nuclear) &&
                 WithinBound(check.frobenius_sq, check.bound_frobenius_sq);
  } else {
    check.pass = WithinBound(check.nuclear, check.bound_nuclear) &&
                 WithinBound(check.frobenius_sq, check.nuclear * check.nuclear);
  }
  return check;
}

}  // namespace chicontract
