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

#include "chicontract/bounds.h"

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "absl/strings/str_cat.h"
#include "chicontract/fluctuation.h"

namespace chicontract {
namespace {

using boost::multiprecision::cpp_int;

absl::Status CheckBoundInputs(int k, double eps) {
  if (k < 2 || k % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("k must be even, got ", k));
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("eps must be in (0, 1), got ", eps));
  }
  return absl::OkStatus();
}

double Log2BigInt(const cpp_int& value) {
  const int64_t msb = static_cast<int64_t>(boost::multiprecision::msb(value));
  if (msb < 61) return std::log2(value.convert_to<double>());
  const int64_t shift = msb - 60;
  const cpp_int top = value >> shift;
  return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

}  // namespace

const char* BoundTaskName(BoundTask task) {
  switch (task) {
    case BoundTask::kLearning:
      return "learning";
    case BoundTask::kTestingPublic:
      return "testing_public";
    case BoundTask::kTestingPrivate:
      return "testing_private";
  }
  return "unknown";
}

absl::StatusOr<BoundReport> LbGeneral(BoundTask task, int k, double eps,
                                      double sup_nuclear, double sup_frobenius) {
  if (absl::Status s = CheckBoundInputs(k, eps); !s.ok()) return s;
  if (!(sup_nuclear > 0.0) || !(sup_frobenius > 0.0) || !std::isfinite(sup_nuclear) ||
      !std::isfinite(sup_frobenius)) {
    return absl::InvalidArgumentError("norm suprema must be positive and finite");
  }
  BoundReport report;
  report.task = task;
  report.constraint =
      absl::StrCat("norms(nuclear=", sup_nuclear, ",frobenius=", sup_frobenius, ")");
  report.k = k;
  report.eps = eps;
  report.sup_nuclear = sup_nuclear;
  report.sup_frobenius = sup_frobenius;
  const double kd = k;
  const double e2 = eps * eps;
  switch (task) {
    case BoundTask::kLearning:
      report.value = (kd / e2) * (kd / sup_nuclear);
      report.formula = "Omega((k/eps^2) * (k/sup||H||_*))";
      break;
    case BoundTask::kTestingPublic:
      report.value = (std::sqrt(kd) / e2) * (std::sqrt(kd) / sup_frobenius);
      report.formula = "Omega((sqrt(k)/eps^2) * (sqrt(k)/sup||H||_F))";
      break;
    case BoundTask::kTestingPrivate:
      report.value = (std::sqrt(kd) / e2) * (kd / sup_nuclear);
      report.formula = "Omega((sqrt(k)/eps^2) * (k/sup||H||_*))";
      break;
  }
  report.formula += ", universal constant set to 1";
  return report;
}

absl::StatusOr<TableSuprema> TableNormSuprema(int k, const ConstraintSpec& spec) {
  if (absl::Status s = ValidateConstraint(spec); !s.ok()) return s;
  TableSuprema sup;
  if (spec.kind == ConstraintSpec::Kind::kCommunication) {
    // ||H||_F <= sqrt(2) 2^{l/2}; the sqrt(2) is a constant and is dropped at
    // order level. Both norms are also at most their identity-channel values.
    const double nuclear = std::ldexp(1.0, spec.bits);
    const double frobenius = std::sqrt(nuclear);
    sup.nuclear = std::min(nuclear, static_cast<double>(k));
    sup.frobenius = std::min(frobenius, std::sqrt(static_cast<double>(k)));
    if (nuclear >= k) {
      sup.caveats.push_back("2^l >= k: constraint is vacuous at order level");
    }
    return sup;
  }
  const double nuclear = 0.5 * std::pow(std::expm1(spec.rho), 2);
  sup.nuclear = nuclear;
  sup.frobenius = nuclear;
  if (spec.OutsidePrivacyRegime()) {
    sup.caveats.push_back("rho > 1: the privacy norm bound is stated for rho <= 1");
  }
  return sup;
}

absl::StatusOr<std::vector<BoundReport>> LbTable(int k, double eps,
                                                 std::optional<int> bits,
                                                 std::optional<double> rho) {
  if (!bits.has_value() && !rho.has_value()) {
    return absl::InvalidArgumentError("give a bit budget, a privacy level, or both");
  }
  std::vector<ConstraintSpec> specs;
  if (bits.has_value()) specs.push_back(ConstraintSpec::Communication(*bits));
  if (rho.has_value()) specs.push_back(ConstraintSpec::Privacy(*rho));
  std::vector<BoundReport> cells;
  for (const ConstraintSpec& spec : specs) {
    absl::StatusOr<TableSuprema> sup = TableNormSuprema(k, spec);
    if (!sup.ok()) return sup.status();
    for (BoundTask task :
         {BoundTask::kLearning, BoundTask::kTestingPublic, BoundTask::kTestingPrivate}) {
      absl::StatusOr<BoundReport> cell =
          LbGeneral(task, k, eps, sup->nuclear, sup->frobenius);
      if (!cell.ok()) return cell.status();
      cell->constraint = spec.ToString();
      cell->caveats = sup->caveats;
      if (spec.kind == ConstraintSpec::Kind::kCommunication &&
          task == BoundTask::kTestingPublic) {
        cell->formula +=
            "; sup||H||_F = 2^{l/2} (the norm bound sqrt(2^{l+1}) without its sqrt(2) factor)";
      }
      cells.push_back(*std::move(cell));
    }
  }
  return cells;
}

absl::StatusOr<double> FanoLearningBound(
    const PerturbedFamily& family, std::optional<std::span<const Channel>> channels,
    double log2_packing) {
  if (!family.zeta().is_linear()) {
    return absl::InvalidArgumentError("family size is only known for linear laws");
  }
  if (!(log2_packing >= 0.0)) {
    return absl::InvalidArgumentError("packing count must be at least 1");
  }
  const double log2_size = family.zeta().latent_dim();
  if (log2_size <= log2_packing) {
    return absl::InvalidArgumentError(absl::StrCat(
        "log|P| = ", log2_size, " bits does not exceed log C_eps = ", log2_packing));
  }
  double fluct = 0.0;
  if (channels.has_value()) {
    if (channels->empty()) return absl::InvalidArgumentError("empty channel list");
    for (const Channel& w : *channels) {
      absl::StatusOr<FluctuationReport> r = InducedChi2Fluctuation(w, family);
      if (!r.ok()) return r.status();
      fluct = std::max(fluct, r->value);
    }
  } else {
    absl::StatusOr<FluctuationReport> r = Chi2Fluctuation(family);
    if (!r.ok()) return r.status();
    fluct = r->value;
  }
  if (fluct <= 0.0) return kInfinity;
  return (log2_size - log2_packing) * M_LN2 / fluct;
}

absl::StatusOr<double> HammingBallLog2(int m, int t) {
  if (m < 0 || t < 0 || t > m) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 0 <= t <= m, got m=", m, " t=", t));
  }
  cpp_int binom = 1;
  cpp_int sum = 1;
  for (int j = 1; j <= t; ++j) {
    binom = binom * (m - j + 1) / j;
    sum += binom;
  }
  return Log2BigInt(sum);
}

double BinaryEntropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace chicontract
