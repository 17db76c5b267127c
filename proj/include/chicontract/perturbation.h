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

#ifndef CHICONTRACT_PERTURBATION_H_
#define CHICONTRACT_PERTURBATION_H_

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "chicontract/prob.h"
#include "chicontract/rng.h"

namespace chicontract {

// Exhaustive treatment of Rademacher-driven laws stops at 2^20 atoms.
inline constexpr int kMaxExhaustiveLatentDim = 20;

// The law of the perturbation parameter Z. Two shapes are supported:
//  * linear: Z = V Y with Y uniform on {-1,+1}^r (V = I gives Paninski's
//    uniform hypercube law); exact expectations enumerate Y when r <= 20.
//  * sampled: an arbitrary seeded generator; expectations are Monte Carlo.
class ZetaLaw {
 public:
  using Sampler = std::function<Eigen::VectorXd(CounterRng&)>;

  static ZetaLaw Rademacher(int dim);
  static ZetaLaw Linear(Eigen::MatrixXd mixing);
  static ZetaLaw Sampled(int dim, Sampler sampler);

  int dim() const { return dim_; }
  bool is_linear() const { return !sampler_; }
  // Z is uniform on the hypercube (V is the identity).
  bool is_rademacher() const { return rademacher_; }
  // V, dim x latent_dim. Only meaningful for linear laws.
  const Eigen::MatrixXd& mixing() const { return mixing_; }
  int latent_dim() const { return static_cast<int>(mixing_.cols()); }
  bool exhaustive() const {
    return is_linear() && latent_dim() <= kMaxExhaustiveLatentDim;
  }

  Eigen::VectorXd Sample(CounterRng& rng) const;

  // Calls fn(z, weight) for each of the 2^r equally likely atoms of a linear
  // law, in binary order of Y (bit j of the atom index set
  // means Y_j = -1).
  void ForEachAtom(
      const std::function<void(const Eigen::VectorXd&, double)>& fn) const;

 private:
  ZetaLaw(int dim, Eigen::MatrixXd mixing, bool rademacher, Sampler sampler)
      : dim_(dim),
        mixing_(std::move(mixing)),
        rademacher_(rademacher),
        sampler_(std::move(sampler)) {}

  int dim_;
  Eigen::MatrixXd mixing_;
  bool rademacher_;
  Sampler sampler_;
};

// Normalized perturbation delta(x) = (p(x) - q(x)) / q(x), or its image under
// a channel.
struct PerturbationVector {
  Eigen::VectorXd values;
};

// A family {p_z} around the uniform nominal q on [k], k even:
//   p_z(2i-1) = (1 + scale * z_i) / k,  p_z(2i) = (1 - scale * z_i) / k.
// Members are not required to be valid distributions (Z = VY may leave
// [-1,1]^{k/2}); callers that need distributions go through Member().
class PerturbedFamily {
 public:
  static absl::StatusOr<PerturbedFamily> Create(Distribution q, double scale,
                                                ZetaLaw zeta);

  const Distribution& nominal() const { return q_; }
  int k() const { return q_.k(); }
  int dim() const { return q_.k() / 2; }
  double scale() const { return scale_; }
  const ZetaLaw& zeta() const { return zeta_; }

  // Optional label carried into reports.
  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  // Entries of p_z, possibly outside [0, 1].
  Eigen::VectorXd MemberProbs(const Eigen::VectorXd& z) const;
  bool IsValidMember(const Eigen::VectorXd& z) const;
  // p_z, or an error naming the offending entry.
  absl::StatusOr<Distribution> Member(const Eigen::VectorXd& z) const;
  // delta_z, computed from the linear form (valid for any z).
  PerturbationVector Delta(const Eigen::VectorXd& z) const;
  // d_TV(p_z, q) = (scale / k) * ||z||_1.
  double DistanceFromNominal(const Eigen::VectorXd& z) const;

 private:
  PerturbedFamily(Distribution q, double scale, ZetaLaw zeta)
      : q_(std::move(q)), scale_(scale), zeta_(std::move(zeta)) {}

  Distribution q_;
  double scale_;
  ZetaLaw zeta_;
  std::string id_;
};

// Paninski's family: scale 2*eps, Z uniform on {-1,+1}^{k/2}.
absl::StatusOr<PerturbedFamily> PaninskiFamily(int k, double eps);

// Family with scale c*eps around the uniform `q`, eps in [0, 1/c).
absl::StatusOr<PerturbedFamily> GeneralFamily(const Distribution& q, double c,
                                              double eps, ZetaLaw zeta);

absl::StatusOr<PerturbationVector> NormalizedPerturbation(const Distribution& p,
                                                          const Distribution& q);

// delta^W(y) = sum_x q(x) W(y|x) delta(x) / sum_x q(x) W(y|x); outputs that
// W o q never emits get 0.
absl::StatusOr<PerturbationVector> InducedPerturbation(const Channel& w,
                                                       const Distribution& p,
                                                       const Distribution& q);

// The same map applied to an already-normalized perturbation. Linear in
// `delta`.
absl::StatusOr<PerturbationVector> InducePerturbation(
    const Channel& w, const Distribution& q, const PerturbationVector& delta);

// <a, b> under the weights w: sum_y w(y) a(y) b(y).
double WeightedInnerProduct(const PerturbationVector& a,
                            const PerturbationVector& b,
                            std::span<const double> weights);

struct AlmostPerturbationCheck {
  int64_t trials = 0;
  int64_t hits = 0;              // draws with d_TV(p_Z, q) >= eps
  int64_t invalid_members = 0;   // draws whose p_Z is not a distribution
  double alpha_hat = 0.0;
  double alpha_lower = 0.0;      // one-sided 99% Clopper-Pearson bound
  bool pass = false;             // alpha_lower >= 1/10
};

// Monte Carlo certificate that `family` is an almost eps-perturbation.
absl::StatusOr<AlmostPerturbationCheck> CheckAlmostPerturbation(
    const PerturbedFamily& family, double eps, int64_t trials, uint64_t seed);

// One-sided lower confidence bound for a binomial proportion.
double ClopperPearsonLower(int64_t hits, int64_t trials, double confidence);

}  // namespace chicontract

#endif  // CHICONTRACT_PERTURBATION_H_
