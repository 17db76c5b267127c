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

#include <boost/math/distributions/beta.hpp>

#include "absl/strings/str_cat.h"

namespace chicontract {
namespace {

constexpr double kUniformTolerance = 1e-12;
// Distances equal to eps up to rounding count as hits.
constexpr double kDistanceSlack = 1e-12;
constexpr double kAlmostPerturbationAlpha = 0.1;

}  // namespace

ZetaLaw ZetaLaw::Rademacher(int dim) {
  return ZetaLaw(dim, Eigen::MatrixXd::Identity(dim, dim), true, nullptr);
}

ZetaLaw ZetaLaw::Linear(Eigen::MatrixXd mixing) {
  const int dim = static_cast<int>(mixing.rows());
  return ZetaLaw(dim, std::move(mixing), false, nullptr);
}

ZetaLaw ZetaLaw::Sampled(int dim, Sampler sampler) {
  return ZetaLaw(dim, Eigen::MatrixXd(dim, 0), false, std::move(sampler));
}

Eigen::VectorXd ZetaLaw::Sample(CounterRng& rng) const {
  if (sampler_) return sampler_(rng);
  Eigen::VectorXd y(latent_dim());
  for (int j = 0; j < latent_dim(); ++j) y(j) = rng.Rademacher();
  return mixing_ * y;
}

void ZetaLaw::ForEachAtom(
    const std::function<void(const Eigen::VectorXd&, double)>& fn) const {
  const int r = latent_dim();
  const uint64_t atoms = uint64_t{1} << r;
  const double weight = 1.0 / static_cast<double>(atoms);
  Eigen::VectorXd y(r);
  for (uint64_t a = 0; a < atoms; ++a) {
    for (int j = 0; j < r; ++j) y(j) = ((a >> j) & 1) ? -1.0 : 1.0;
    fn(mixing_ * y, weight);
  }
}

absl::StatusOr<PerturbedFamily> PerturbedFamily::Create(Distribution q,
                                                        double scale,
                                                        ZetaLaw zeta) {
  if (q.k() < 2 || q.k() % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("perturbed families need even k, got ", q.k()));
  }
  for (int x = 0; x < q.k(); ++x) {
    if (std::abs(q[x] - 1.0 / q.k()) > kUniformTolerance) {
      return absl::InvalidArgumentError(
          "perturbed families are built around the uniform distribution");
    }
  }
  if (!std::isfinite(scale) || scale < 0.0) {
    return absl::InvalidArgumentError(absl::StrCat("invalid scale ", scale));
  }
  if (zeta.dim() != q.k() / 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "parameter dimension ", zeta.dim(), " does not match k/2 = ", q.k() / 2));
  }
  return PerturbedFamily(std::move(q), scale, std::move(zeta));
}

Eigen::VectorXd PerturbedFamily::MemberProbs(const Eigen::VectorXd& z) const {
  Eigen::VectorXd p(k());
  for (int i = 0; i < dim(); ++i) {
    p(2 * i) = q_[2 * i] * (1.0 + scale_ * z(i));
    p(2 * i + 1) = q_[2 * i + 1] * (1.0 - scale_ * z(i));
  }
  return p;
}

bool PerturbedFamily::IsValidMember(const Eigen::VectorXd& z) const {
  return scale_ * z.cwiseAbs().maxCoeff() <= 1.0;
}

absl::StatusOr<Distribution> PerturbedFamily::Member(
    const Eigen::VectorXd& z) const {
  if (!IsValidMember(z)) {
    return absl::OutOfRangeError(absl::StrCat(
        "p_z has a negative entry: scale * max|z_i| = ",
        scale_ * z.cwiseAbs().maxCoeff(), " > 1"));
  }
  Eigen::VectorXd p = MemberProbs(z);
  return Distribution::Create(std::vector<double>(p.begin(), p.end()));
}

PerturbationVector PerturbedFamily::Delta(const Eigen::VectorXd& z) const {
  Eigen::VectorXd delta(k());
  for (int i = 0; i < dim(); ++i) {
    delta(2 * i) = scale_ * z(i);
    delta(2 * i + 1) = -scale_ * z(i);
  }
  return {std::move(delta)};
}

double PerturbedFamily::DistanceFromNominal(const Eigen::VectorXd& z) const {
  return scale_ * z.lpNorm<1>() / k();
}

absl::StatusOr<PerturbedFamily> PaninskiFamily(int k, double eps) {
  if (k < 2 || k % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("k must be even, got ", k));
  }
  if (!(eps >= 0.0 && eps < 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be in [0, 1/2), got ", eps));
  }
  return PerturbedFamily::Create(Distribution::Uniform(k), 2.0 * eps,
                                 ZetaLaw::Rademacher(k / 2));
}

absl::StatusOr<PerturbedFamily> GeneralFamily(const Distribution& q, double c,
                                              double eps, ZetaLaw zeta) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    return absl::InvalidArgumentError(absl::StrCat("invalid c=", c));
  }
  if (!(eps >= 0.0 && eps * c < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be in [0, 1/c) = [0, ", 1.0 / c, "), got ", eps));
  }
  return PerturbedFamily::Create(q, c * eps, std::move(zeta));
}

absl::StatusOr<PerturbationVector> NormalizedPerturbation(const Distribution& p,
                                                          const Distribution& q) {
  if (p.k() != q.k()) {
    return absl::InvalidArgumentError(
        absl::StrCat("alphabet mismatch: ", p.k(), " vs ", q.k()));
  }
  if (!q.HasFullSupport()) {
    return absl::InvalidArgumentError(
        "normalized perturbation needs a strictly positive q");
  }
  return PerturbationVector{(p.AsVector() - q.AsVector()).cwiseQuotient(q.AsVector())};
}

absl::StatusOr<PerturbationVector> InducePerturbation(
    const Channel& w, const Distribution& q, const PerturbationVector& delta) {
  if (w.k() != q.k() || delta.values.size() != q.k()) {
    return absl::InvalidArgumentError("channel, nominal and perturbation disagree on k");
  }
  const Eigen::VectorXd weighted = q.AsVector().cwiseProduct(delta.values);
  const Eigen::VectorXd numerator = w.matrix() * weighted;
  const Eigen::VectorXd denominator = w.matrix() * q.AsVector();
  Eigen::VectorXd induced = Eigen::VectorXd::Zero(w.m());
  for (int y = 0; y < w.m(); ++y) {
    if (denominator(y) > 0.0) induced(y) = numerator(y) / denominator(y);
  }
  return PerturbationVector{std::move(induced)};
}

absl::StatusOr<PerturbationVector> InducedPerturbation(const Channel& w,
                                                       const Distribution& p,
                                                       const Distribution& q) {
  absl::StatusOr<PerturbationVector> delta = NormalizedPerturbation(p, q);
  if (!delta.ok()) return delta.status();
  return InducePerturbation(w, q, *delta);
}

double WeightedInnerProduct(const PerturbationVector& a,
                            const PerturbationVector& b,
                            std::span<const double> weights) {
  double acc = 0.0;
  for (size_t y = 0; y < weights.size(); ++y) {
    if (weights[y] > 0.0) acc += weights[y] * a.values(y) * b.values(y);
  }
  return acc;
}

double ClopperPearsonLower(int64_t hits, int64_t trials, double confidence) {
  if (hits <= 0 || trials <= 0) return 0.0;
  boost::math::beta_distribution<double> beta(static_cast<double>(hits),
                                              static_cast<double>(trials - hits + 1));
  return boost::math::quantile(beta, 1.0 - confidence);
}

absl::StatusOr<AlmostPerturbationCheck> CheckAlmostPerturbation(
    const PerturbedFamily& family, double eps, int64_t trials, uint64_t seed) {
  if (trials < 1000) {
    return absl::InvalidArgumentError("almost-perturbation check needs >= 1000 trials");
  }
  if (!(eps > 0.0)) return absl::InvalidArgumentError("eps must be positive");
  AlmostPerturbationCheck check;
  check.trials = trials;
  for (int64_t t = 0; t < trials; ++t) {
    CounterRng rng = CounterRng::ForTrial(seed, t, 0, StreamPurpose::kParameter);
    const Eigen::VectorXd z = family.zeta().Sample(rng);
    if (z.size() != family.dim() || !z.allFinite()) {
      return absl::InternalError("parameter sampler returned a malformed vector");
    }
    if (!family.IsValidMember(z)) ++check.invalid_members;
    if (family.DistanceFromNominal(z) >= eps - kDistanceSlack) ++check.hits;
  }
  check.alpha_hat = static_cast<double>(check.hits) / trials;
  check.alpha_lower = ClopperPearsonLower(check.hits, trials, 0.99);
  check.pass = check.alpha_lower >= kAlmostPerturbationAlpha;
  return check;
}

}  // namespace chicontract
