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

#include "chicontract/fluctuation.h"

#include <bit>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace chicontract {
namespace {

constexpr int kMaxForcedExhaustiveDim = 30;
constexpr uint64_t kMaxExactIngsterPairs = uint64_t{1} << 24;
constexpr int kChaosRefreshPeriod = 512;

// Streaming log-sum-exp in a fixed accumulation order.
class LogMeanExp {
 public:
  void Add(double t) {
    ++count_;
    if (count_ == 1) {
      max_ = t;
      sum_ = 1.0;
      sum_sq_ = 1.0;
      return;
    }
    if (t > max_) {
      const double r = std::exp(max_ - t);
      sum_ = sum_ * r + 1.0;
      sum_sq_ = sum_sq_ * r * r + 1.0;
      max_ = t;
    } else {
      const double e = std::exp(t - max_);
      sum_ += e;
      sum_sq_ += e * e;
    }
  }
  double Value() const { return max_ + std::log(sum_ / count_); }
  // Delta-method standard error of Value() for i.i.d. terms.
  double StdErr() const {
    const double mean = sum_ / count_;
    const double var = std::max(sum_sq_ / count_ - mean * mean, 0.0);
    return std::sqrt(var / count_) / mean;
  }

 private:
  int64_t count_ = 0;
  double max_ = 0.0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

// Mean and standard error of i.i.d. draws.
class RunningMean {
 public:
  void Add(double v) {
    ++count_;
    const double delta = v - mean_;
    mean_ += delta / count_;
    m2_ += delta * (v - mean_);
  }
  double Mean() const { return mean_; }
  double StdErr() const {
    return count_ > 1 ? std::sqrt(m2_ / (count_ - 1) / count_) : 0.0;
  }

 private:
  int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double ProductLogCosh(const Eigen::VectorXd& my, double lambda) {
  double t = 0.0;
  for (Eigen::Index j = 0; j < my.size(); ++j) t += LogCosh(lambda * my(j));
  return t;
}

absl::Status CheckFinite(double value, absl::string_view what) {
  if (!std::isfinite(value)) {
    return absl::OutOfRangeError(absl::StrCat(what, " overflowed"));
  }
  return absl::OkStatus();
}

absl::Status CheckChannelsMatch(std::span<const Channel> channels,
                                const PerturbedFamily& family) {
  if (channels.empty()) return absl::InvalidArgumentError("no channels given");
  for (const Channel& w : channels) {
    if (w.k() != family.k()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "channel input alphabet ", w.k(), " does not match family k=", family.k()));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Method> ChooseMethod(const PerturbedFamily& family,
                                    const FluctuationOptions& options,
                                    bool closed_form_available) {
  const ZetaLaw& zeta = family.zeta();
  if (options.method.has_value()) {
    switch (*options.method) {
      case Method::kClosedForm:
        if (!closed_form_available) {
          return absl::InvalidArgumentError("no closed form for this family");
        }
        return Method::kClosedForm;
      case Method::kExhaustive:
        if (!zeta.is_linear() || zeta.latent_dim() > kMaxForcedExhaustiveDim) {
          return absl::InvalidArgumentError(
              "exhaustive evaluation needs a linear parameter law of small dimension");
        }
        return Method::kExhaustive;
      case Method::kMonteCarlo:
        return Method::kMonteCarlo;
    }
  }
  if (closed_form_available) return Method::kClosedForm;
  if (zeta.exhaustive()) return Method::kExhaustive;
  return Method::kMonteCarlo;
}

absl::Status CheckSamples(const FluctuationOptions& options) {
  if (options.mc_samples < 2) {
    return absl::InvalidArgumentError("Monte Carlo needs at least 2 samples");
  }
  return absl::OkStatus();
}

Eigen::VectorXd DrawZ(const PerturbedFamily& family, uint64_t seed, int64_t index) {
  CounterRng rng = CounterRng::ForTrial(seed, static_cast<uint64_t>(index), 0,
                                        StreamPurpose::kMonteCarlo);
  return family.zeta().Sample(rng);
}

// E_Z f(Z) over the atoms or over Monte Carlo draws of Z.
absl::StatusOr<Estimate> ExpectOverZ(
    const PerturbedFamily& family, Method method, const FluctuationOptions& options,
    const std::function<absl::StatusOr<double>(const Eigen::VectorXd&)>& f) {
  Estimate estimate;
  estimate.method = method;
  if (method == Method::kExhaustive) {
    double acc = 0.0;
    absl::Status status;
    family.zeta().ForEachAtom([&](const Eigen::VectorXd& z, double weight) {
      if (!status.ok()) return;
      absl::StatusOr<double> v = f(z);
      if (!v.ok()) {
        status = v.status();
        return;
      }
      acc += weight * *v;
    });
    if (!status.ok()) return status;
    estimate.value = acc;
    return estimate;
  }
  if (absl::Status s = CheckSamples(options); !s.ok()) return s;
  RunningMean mean;
  for (int64_t i = 0; i < options.mc_samples; ++i) {
    absl::StatusOr<double> v = f(DrawZ(family, options.seed, i));
    if (!v.ok()) return v.status();
    mean.Add(*v);
  }
  estimate.value = mean.Mean();
  estimate.mc_stderr = mean.StdErr();
  return estimate;
}

// log E exp(lambda Z^T A Z') for the family's parameter law.
absl::StatusOr<Estimate> DecoupledFromMatrix(const PerturbedFamily& family,
                                             const Eigen::MatrixXd& a,
                                             double lambda, Method method,
                                             const FluctuationOptions& options) {
  const ZetaLaw& zeta = family.zeta();
  if (zeta.is_linear()) {
    const Eigen::MatrixXd& v = zeta.mixing();
    Eigen::MatrixXd m = v.transpose() * a * v;
    m = 0.5 * (m + m.transpose());
    FluctuationOptions inner = options;
    inner.method = method;
    return LogRademacherChaosMgf(m, lambda, inner);
  }
  if (absl::Status s = CheckSamples(options); !s.ok()) return s;
  LogMeanExp acc;
  for (int64_t i = 0; i < options.mc_samples; ++i) {
    const Eigen::VectorXd z = DrawZ(family, options.seed, 2 * i);
    const Eigen::VectorXd zp = DrawZ(family, options.seed, 2 * i + 1);
    acc.Add(lambda * z.dot(a * zp));
  }
  Estimate estimate{acc.Value(), Method::kMonteCarlo, acc.StdErr()};
  if (absl::Status s = CheckFinite(estimate.value, "decoupled fluctuation"); !s.ok()) {
    return s;
  }
  return estimate;
}

FluctuationReport MakeReport(FluctuationKind kind, const Estimate& estimate, int n,
                             const PerturbedFamily& family,
                             const FluctuationOptions& options) {
  FluctuationReport report;
  report.kind = kind;
  report.value = estimate.value;
  report.method = estimate.method;
  report.mc_stderr = estimate.mc_stderr;
  report.n = n;
  report.family_id = family.id();
  report.channel_ids = options.channel_ids;
  return report;
}

// The view one player has of the perturbation: weights of its message law
// under the nominal and, optionally, the channel it applies.
struct PlayerView {
  const Channel* channel;
  std::vector<double> weights;
};

absl::StatusOr<Estimate> IngsterImpl(const std::vector<PlayerView>& players,
                                     const PerturbedFamily& family,
                                     const FluctuationOptions& options) {
  auto induce = [&](const Eigen::VectorXd& z)
      -> absl::StatusOr<std::vector<PerturbationVector>> {
    PerturbationVector delta = family.Delta(z);
    std::vector<PerturbationVector> out;
    out.reserve(players.size());
    for (const PlayerView& player : players) {
      if (player.channel == nullptr) {
        out.push_back(delta);
        continue;
      }
      absl::StatusOr<PerturbationVector> induced =
          InducePerturbation(*player.channel, family.nominal(), delta);
      if (!induced.ok()) return induced.status();
      out.push_back(*std::move(induced));
    }
    return out;
  };
  auto pair_term = [&](const std::vector<PerturbationVector>& a,
                       const std::vector<PerturbationVector>& b) {
    double product = 1.0;
    for (size_t j = 0; j < players.size(); ++j) {
      product *= 1.0 + WeightedInnerProduct(a[j], b[j], players[j].weights);
    }
    return product;
  };

  const ZetaLaw& zeta = family.zeta();
  const bool exact = zeta.is_linear() &&
                     zeta.latent_dim() <= kMaxExhaustiveLatentDim &&
                     (uint64_t{1} << (2 * zeta.latent_dim())) <= kMaxExactIngsterPairs &&
                     options.method != Method::kMonteCarlo;
  Estimate estimate;
  if (exact) {
    std::vector<std::vector<PerturbationVector>> atoms;
    std::vector<double> weights;
    absl::Status status;
    zeta.ForEachAtom([&](const Eigen::VectorXd& z, double weight) {
      if (!status.ok()) return;
      absl::StatusOr<std::vector<PerturbationVector>> induced = induce(z);
      if (!induced.ok()) {
        status = induced.status();
        return;
      }
      atoms.push_back(*std::move(induced));
      weights.push_back(weight);
    });
    if (!status.ok()) return status;
    double acc = 0.0;
    for (size_t a = 0; a < atoms.size(); ++a) {
      double row = 0.0;
      for (size_t b = 0; b < atoms.size(); ++b) {
        row += weights[b] * pair_term(atoms[a], atoms[b]);
      }
      acc += weights[a] * row;
    }
    estimate.value = acc - 1.0;
    estimate.method = Method::kExhaustive;
  } else {
    if (absl::Status s = CheckSamples(options); !s.ok()) return s;
    RunningMean mean;
    for (int64_t i = 0; i < options.mc_samples; ++i) {
      absl::StatusOr<std::vector<PerturbationVector>> a =
          induce(DrawZ(family, options.seed, 2 * i));
      absl::StatusOr<std::vector<PerturbationVector>> b =
          induce(DrawZ(family, options.seed, 2 * i + 1));
      if (!a.ok()) return a.status();
      if (!b.ok()) return b.status();
      mean.Add(pair_term(*a, *b));
    }
    estimate.value = mean.Mean() - 1.0;
    estimate.method = Method::kMonteCarlo;
    estimate.mc_stderr = mean.StdErr();
  }
  if (absl::Status s = CheckFinite(estimate.value, "mixture chi-square"); !s.ok()) {
    return s;
  }
  return estimate;
}

}  // namespace

const char* FluctuationKindName(FluctuationKind kind) {
  switch (kind) {
    case FluctuationKind::kChiSquare:
      return "chi2";
    case FluctuationKind::kDecoupled:
      return "decoupled";
    case FluctuationKind::kInducedChiSquare:
      return "induced_chi2";
    case FluctuationKind::kInducedDecoupled:
      return "induced_decoupled";
  }
  return "unknown";
}

const char* MethodName(Method method) {
  switch (method) {
    case Method::kClosedForm:
      return "closed_form";
    case Method::kExhaustive:
      return "exhaustive";
    case Method::kMonteCarlo:
      return "monte_carlo";
  }
  return "unknown";
}

double LogCosh(double x) {
  const double a = std::abs(x);
  if (a < 1.0) {
    // cosh(a) - 1 = 2 sinh(a/2)^2 keeps full relative precision near zero.
    const double s = std::sinh(0.5 * a);
    return std::log1p(2.0 * s * s);
  }
  return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
}

absl::StatusOr<Estimate> LogRademacherChaosMgf(const Eigen::MatrixXd& m,
                                               double lambda,
                                               const FluctuationOptions& options) {
  if (m.rows() != m.cols()) return absl::InvalidArgumentError("matrix must be square");
  if (!std::isfinite(lambda)) return absl::InvalidArgumentError("lambda must be finite");
  const int r = static_cast<int>(m.rows());
  const bool exhaustive =
      options.method.has_value()
          ? *options.method != Method::kMonteCarlo
          : r <= kMaxExhaustiveLatentDim;
  if (exhaustive && r > kMaxForcedExhaustiveDim) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot enumerate 2^", r, " sign vectors"));
  }
  if (r == 0) return Estimate{0.0, Method::kExhaustive, std::nullopt};

  LogMeanExp acc;
  if (exhaustive) {
    // prod_j cosh(lambda (MY)_j) is even in Y, so fix Y_{r-1} = +1 and walk
    // the remaining coordinates in Gray-code order.
    Eigen::VectorXd y = Eigen::VectorXd::Ones(r);
    Eigen::VectorXd my = m * y;
    const uint64_t count = uint64_t{1} << (r - 1);
    acc.Add(ProductLogCosh(my, lambda));
    for (uint64_t g = 1; g < count; ++g) {
      const int bit = std::countr_zero(g);
      y(bit) = -y(bit);
      if (g % kChaosRefreshPeriod == 0) {
        my.noalias() = m * y;
      } else {
        my += (2.0 * y(bit)) * m.col(bit);
      }
      acc.Add(ProductLogCosh(my, lambda));
    }
    Estimate estimate{acc.Value(), Method::kExhaustive, std::nullopt};
    if (absl::Status s = CheckFinite(estimate.value, "chaos MGF"); !s.ok()) return s;
    return estimate;
  }
  if (absl::Status s = CheckSamples(options); !s.ok()) return s;
  Eigen::VectorXd y(r);
  for (int64_t i = 0; i < options.mc_samples; ++i) {
    CounterRng rng = CounterRng::ForTrial(options.seed, static_cast<uint64_t>(i), 0,
                                          StreamPurpose::kMonteCarlo);
    for (int j = 0; j < r; ++j) y(j) = rng.Rademacher();
    acc.Add(ProductLogCosh(m * y, lambda));
  }
  Estimate estimate{acc.Value(), Method::kMonteCarlo, acc.StdErr()};
  if (absl::Status s = CheckFinite(estimate.value, "chaos MGF"); !s.ok()) return s;
  return estimate;
}

absl::StatusOr<FluctuationReport> Chi2Fluctuation(const PerturbedFamily& family,
                                                  const FluctuationOptions& options) {
  absl::StatusOr<Method> method =
      ChooseMethod(family, options, family.zeta().is_rademacher());
  if (!method.ok()) return method.status();
  if (*method == Method::kClosedForm) {
    if (family.scale() > 1.0) {
      return absl::OutOfRangeError("family members have negative entries");
    }
    // E_Z (2 scale^2 / k) ||Z||^2 with ||Z||^2 = k/2.
    const double s = family.scale();
    return MakeReport(FluctuationKind::kChiSquare, {s * s, Method::kClosedForm, {}}, 1,
                      family, options);
  }
  const Distribution& q = family.nominal();
  absl::StatusOr<Estimate> estimate = ExpectOverZ(
      family, *method, options, [&](const Eigen::VectorXd& z) -> absl::StatusOr<double> {
        absl::StatusOr<Distribution> p = family.Member(z);
        if (!p.ok()) return p.status();
        return DivergenceUnchecked(p->probs(), q.probs(), DivergenceKind::kChiSquare);
      });
  if (!estimate.ok()) return estimate.status();
  return MakeReport(FluctuationKind::kChiSquare, *estimate, 1, family, options);
}

absl::StatusOr<FluctuationReport> InducedChi2Fluctuation(
    const Channel& w, const PerturbedFamily& family,
    const FluctuationOptions& options) {
  if (absl::Status s = CheckChannelsMatch({&w, 1}, family); !s.ok()) return s;
  // The closed form (scale^2 / k) tr H(W) is only the default when the
  // hypercube is too large to enumerate.
  const bool rademacher = family.zeta().is_rademacher();
  FluctuationOptions effective = options;
  if (!effective.method.has_value() && rademacher && !family.zeta().exhaustive()) {
    effective.method = Method::kClosedForm;
  }
  absl::StatusOr<Method> method = ChooseMethod(
      family, effective, rademacher && effective.method == Method::kClosedForm);
  if (!method.ok()) return method.status();
  if (*method == Method::kClosedForm) {
    absl::StatusOr<HMatrix> h = ComputeHMatrix(w);
    if (!h.ok()) return h.status();
    const double s = family.scale();
    return MakeReport(FluctuationKind::kInducedChiSquare,
                      {s * s / family.k() * h->trace(), Method::kClosedForm, {}}, 1,
                      family, options);
  }
  const Eigen::VectorXd nominal_out = w.matrix() * family.nominal().AsVector();
  absl::StatusOr<Estimate> estimate = ExpectOverZ(
      family, *method, options, [&](const Eigen::VectorXd& z) -> absl::StatusOr<double> {
        if (!family.IsValidMember(z)) {
          return absl::OutOfRangeError("family member with a negative entry");
        }
        const Eigen::VectorXd out = w.matrix() * family.MemberProbs(z);
        return DivergenceUnchecked({out.data(), static_cast<size_t>(out.size())},
                                   {nominal_out.data(), static_cast<size_t>(nominal_out.size())},
                                   DivergenceKind::kChiSquare);
      });
  if (!estimate.ok()) return estimate.status();
  return MakeReport(FluctuationKind::kInducedChiSquare, *estimate, 1, family, options);
}

absl::StatusOr<FluctuationReport> DecoupledFluctuation(
    const PerturbedFamily& family, int n, const FluctuationOptions& options) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  absl::StatusOr<Method> method =
      ChooseMethod(family, options, family.zeta().is_rademacher());
  if (!method.ok()) return method.status();
  const double s = family.scale();
  const double lambda = n * s * s / family.k();
  if (*method == Method::kClosedForm) {
    // Each coordinate contributes log cosh(2 lambda).
    const double value = family.dim() * LogCosh(2.0 * lambda);
    return MakeReport(FluctuationKind::kDecoupled, {value, Method::kClosedForm, {}}, n,
                      family, options);
  }
  const Eigen::MatrixXd identity_h =
      2.0 * Eigen::MatrixXd::Identity(family.dim(), family.dim());
  absl::StatusOr<Estimate> estimate =
      DecoupledFromMatrix(family, identity_h, lambda, *method, options);
  if (!estimate.ok()) return estimate.status();
  return MakeReport(FluctuationKind::kDecoupled, *estimate, n, family, options);
}

absl::StatusOr<FluctuationReport> InducedDecoupledFluctuation(
    std::span<const Channel> channels, const PerturbedFamily& family,
    const FluctuationOptions& options) {
  if (absl::Status s = CheckChannelsMatch(channels, family); !s.ok()) return s;
  absl::StatusOr<Method> method = ChooseMethod(family, options, false);
  if (!method.ok()) return method.status();
  absl::StatusOr<HMatrix> hbar = AverageHMatrix(channels);
  if (!hbar.ok()) return hbar.status();
  const int n = static_cast<int>(channels.size());
  const double s = family.scale();
  const double lambda = n * s * s / family.k();
  absl::StatusOr<Estimate> estimate =
      DecoupledFromMatrix(family, hbar->entries(), lambda, *method, options);
  if (!estimate.ok()) return estimate.status();
  return MakeReport(FluctuationKind::kInducedDecoupled, *estimate, n, family, options);
}

absl::StatusOr<Estimate> IngsterChi2(std::span<const Channel> channels,
                                     const PerturbedFamily& family,
                                     const FluctuationOptions& options) {
  if (absl::Status s = CheckChannelsMatch(channels, family); !s.ok()) return s;
  std::vector<PlayerView> players;
  for (const Channel& w : channels) {
    const Eigen::VectorXd out = w.matrix() * family.nominal().AsVector();
    players.push_back({&w, std::vector<double>(out.begin(), out.end())});
  }
  return IngsterImpl(players, family, options);
}

absl::StatusOr<Estimate> IngsterChi2(const PerturbedFamily& family, int n,
                                     const FluctuationOptions& options) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  const std::span<const double> q = family.nominal().probs();
  std::vector<PlayerView> players(
      n, PlayerView{nullptr, std::vector<double>(q.begin(), q.end())});
  return IngsterImpl(players, family, options);
}

absl::StatusOr<MixtureStats> BruteForceMixtureStatsAgainst(
    std::optional<std::span<const Channel>> channels, const PerturbedFamily& family,
    const Distribution& null_input, int n, int64_t state_cap) {
  if (channels.has_value()) {
    if (absl::Status s = CheckChannelsMatch(*channels, family); !s.ok()) return s;
    if (static_cast<int>(channels->size()) != n) {
      return absl::InvalidArgumentError(
          absl::StrCat("expected ", n, " channels, got ", channels->size()));
    }
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (null_input.k() != family.k()) {
    return absl::InvalidArgumentError("null distribution has the wrong alphabet");
  }
  if (!family.zeta().exhaustive()) {
    return absl::InvalidArgumentError(
        "brute force needs a parameter law with at most 2^20 atoms");
  }
  std::vector<int> sizes;
  for (int j = 0; j < n; ++j) {
    sizes.push_back(channels.has_value() ? (*channels)[j].m() : family.k());
  }
  absl::StatusOr<int64_t> states = ProductStateCount(sizes, state_cap);
  if (!states.ok()) return states.status();

  auto product_of = [&](const Distribution& input) -> absl::StatusOr<std::vector<double>> {
    ProductSpec spec;
    for (int j = 0; j < n; ++j) {
      ProductFactor factor{input, std::nullopt};
      if (channels.has_value()) factor.channel = (*channels)[j];
      spec.factors.push_back(std::move(factor));
    }
    return EnumerateProduct(spec, state_cap);
  };

  std::vector<double> mixture(*states, 0.0);
  absl::Status status;
  family.zeta().ForEachAtom([&](const Eigen::VectorXd& z, double weight) {
    if (!status.ok()) return;
    absl::StatusOr<Distribution> p = family.Member(z);
    if (!p.ok()) {
      status = p.status();
      return;
    }
    absl::StatusOr<std::vector<double>> joint = product_of(*p);
    if (!joint.ok()) {
      status = joint.status();
      return;
    }
    for (int64_t s = 0; s < *states; ++s) mixture[s] += weight * (*joint)[s];
  });
  if (!status.ok()) return status;
  absl::StatusOr<std::vector<double>> nominal = product_of(null_input);
  if (!nominal.ok()) return nominal.status();
  return MixtureStats{
      DivergenceUnchecked(mixture, *nominal, DivergenceKind::kChiSquare),
      DivergenceUnchecked(mixture, *nominal, DivergenceKind::kTotalVariation)};
}

absl::StatusOr<MixtureStats> BruteForceMixtureStats(
    std::optional<std::span<const Channel>> channels, const PerturbedFamily& family,
    int n, int64_t state_cap) {
  return BruteForceMixtureStatsAgainst(channels, family, family.nominal(), n,
                                       state_cap);
}

absl::StatusOr<ChaosMgf> ChaosMgfBound(const HMatrix& h, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError(absl::StrCat("lambda must be >= 0, got ", lambda));
  }
  ChaosMgf result;
  const double rho = h.spectral_radius();
  result.valid = rho == 0.0 || 2.0 * lambda * rho < 1.0;
  result.bound = result.valid ? 0.5 * lambda * lambda * h.frobenius_sq() /
                                    (1.0 - 4.0 * lambda * lambda * rho * rho)
                              : kInfinity;
  if (h.dim() <= kMaxExhaustiveLatentDim) {
    absl::StatusOr<Estimate> exact = LogRademacherChaosMgf(h.entries(), lambda);
    if (!exact.ok()) return exact.status();
    result.exact_log_mgf = exact->value;
  }
  return result;
}

}  // namespace chicontract
