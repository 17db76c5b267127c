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

#include "absl/strings/str_cat.h"

namespace chicontract {
namespace {

constexpr double kGapSlack = 1e-9;
constexpr double kPaninskiScale = 2.0;

absl::StatusOr<PerturbedFamily> BottomEigenFamily(const AdversaryBasis& basis,
                                                  int k, double c, double eps) {
  absl::StatusOr<PerturbedFamily> family =
      GeneralFamily(Distribution::Uniform(k), c, eps, ZetaLaw::Linear(basis.v));
  if (!family.ok()) return family.status();
  family->set_id(absl::StrCat("adversarial(k=", k, ",eps=", eps, ",c=", c, ")"));
  return family;
}

}  // namespace

Eigen::MatrixXd AdversaryBasis::Compressed(const Eigen::MatrixXd& hbar) const {
  return v.transpose() * hbar * v;
}

absl::StatusOr<AdversaryBasis> AdversarialBasis(const HMatrix& hbar, double c) {
  const int dim = hbar.dim();
  if (dim % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must be divisible by 4, got k=", 2 * dim));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    return absl::InvalidArgumentError(absl::StrCat("invalid c=", c));
  }
  const int cols = dim / 2;
  Eigen::MatrixXd v = hbar.eigenvectors().leftCols(cols);
  for (int j = 0; j < cols; ++j) {
    Eigen::Index arg = 0;
    v.col(j).cwiseAbs().maxCoeff(&arg);
    if (v(arg, j) < 0.0) v.col(j) = -v.col(j);
  }
  // Householder QR with the signs of R's diagonal folded back into Q keeps
  // the columns (they are already orthonormal up to rounding).
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, cols);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(cols, cols);
  for (int j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  AdversaryBasis basis;
  basis.v = std::move(q);
  basis.eigenvalues = hbar.eigenvalues();
  basis.c = c;
  return basis;
}

absl::StatusOr<AdversaryResult> AdversarialPerturbation(
    std::span<const Channel> channels, double eps, const AdversaryOptions& options) {
  if (channels.empty()) return absl::InvalidArgumentError("no channels given");
  const int k = channels.front().k();
  if (k % 4 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("k must be divisible by 4, got ", k));
  }
  absl::StatusOr<HMatrix> hbar = AverageHMatrix(channels);
  if (!hbar.ok()) return hbar.status();
  absl::StatusOr<AdversaryBasis> basis = AdversarialBasis(*hbar, options.c);
  if (!basis.ok()) return basis.status();
  absl::StatusOr<PerturbedFamily> family = BottomEigenFamily(*basis, k, options.c, eps);
  if (!family.ok()) return family.status();

  AdversaryReport report;
  absl::StatusOr<FluctuationReport> achieved =
      InducedDecoupledFluctuation(channels, *family, options.fluctuation);
  if (!achieved.ok()) return achieved.status();
  report.achieved = *std::move(achieved);

  if (eps > 0.0) {
    absl::StatusOr<AlmostPerturbationCheck> certificate = CheckAlmostPerturbation(
        *family, eps, options.certificate_trials, options.seed);
    if (!certificate.ok()) return certificate.status();
    report.certificate = *certificate;
  }
  if (family->zeta().exhaustive()) {
    int64_t invalid = 0;
    int64_t total = 0;
    family->zeta().ForEachAtom([&](const Eigen::VectorXd& z, double) {
      ++total;
      if (!family->IsValidMember(z)) ++invalid;
    });
    report.invalid_rate = static_cast<double>(invalid) / total;
    report.invalid_rate_exact = true;
  } else if (report.certificate.has_value()) {
    report.invalid_rate = static_cast<double>(report.certificate->invalid_members) /
                          report.certificate->trials;
  }

  const int n = static_cast<int>(channels.size());
  const double c = options.c;
  const double tr = hbar->trace();
  report.ceiling = 8.0 * std::pow(c, 4) * n * n * std::pow(eps, 4) * tr * tr /
                   (3.0 * std::pow(k, 3));
  for (const Channel& w : channels) {
    absl::StatusOr<HMatrix> h = ComputeHMatrix(w);
    if (!h.ok()) return h.status();
    report.max_nuclear = std::max(report.max_nuclear, h->nuclear());
  }
  report.validity_constant = options.validity_constant.value_or(1.0 / (8.0 * c * c));
  report.within_validity_regime =
      n * eps * eps * report.max_nuclear <=
      report.validity_constant * std::pow(k, 1.5);
  report.compressed_frobenius_sq = basis->Compressed(hbar->entries()).squaredNorm();
  report.norm_relation_bound = 4.0 / k * hbar->nuclear() * hbar->nuclear();

  return AdversaryResult{*std::move(family), *std::move(basis), std::move(report)};
}

absl::StatusOr<MaxminGap> ComputeMaxminGap(std::span<const Channel> channels,
                                           double eps,
                                           const FluctuationOptions& options) {
  if (channels.empty()) return absl::InvalidArgumentError("no channels given");
  const int k = channels.front().k();
  if (k % 4 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("k must be divisible by 4, got ", k));
  }
  absl::StatusOr<PerturbedFamily> paninski = PaninskiFamily(k, eps);
  if (!paninski.ok()) return paninski.status();
  absl::StatusOr<HMatrix> hbar = AverageHMatrix(channels);
  if (!hbar.ok()) return hbar.status();
  absl::StatusOr<AdversaryBasis> basis = AdversarialBasis(*hbar, kPaninskiScale);
  if (!basis.ok()) return basis.status();
  absl::StatusOr<PerturbedFamily> adversarial =
      BottomEigenFamily(*basis, k, kPaninskiScale, eps);
  if (!adversarial.ok()) return adversarial.status();

  absl::StatusOr<FluctuationReport> pan =
      InducedDecoupledFluctuation(channels, *paninski, options);
  if (!pan.ok()) return pan.status();
  absl::StatusOr<FluctuationReport> adv =
      InducedDecoupledFluctuation(channels, *adversarial, options);
  if (!adv.ok()) return adv.status();

  MaxminGap gap;
  gap.paninski_value = pan->value;
  gap.adversarial_value = adv->value;
  gap.ratio = gap.paninski_value > 0.0 ? gap.adversarial_value / gap.paninski_value : 0.0;
  if (gap.adversarial_value > gap.paninski_value + kGapSlack) {
    return absl::InternalError(absl::StrCat(
        "adversarial fluctuation ", gap.adversarial_value,
        " exceeds the Paninski fluctuation ", gap.paninski_value));
  }
  return gap;
}

}  // namespace chicontract
