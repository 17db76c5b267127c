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

#ifndef CHICONTRACT_PROB_H_
#define CHICONTRACT_PROB_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"

namespace chicontract {

// Column sums and total mass must be within this distance of 1. Inputs that
// pass are renormalized exactly once at construction.
inline constexpr double kStochasticTolerance = 1e-9;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// A probability vector over the alphabet [k] = {0, ..., k-1}.
class Distribution {
 public:
  static absl::StatusOr<Distribution> Create(std::vector<double> probs);
  static Distribution Uniform(int k);
  // Point mass at `x`.
  static Distribution Delta(int k, int x);

  int k() const { return static_cast<int>(probs_.size()); }
  double operator[](int x) const { return probs_[x]; }
  std::span<const double> probs() const { return probs_; }
  Eigen::Map<const Eigen::VectorXd> AsVector() const {
    return Eigen::Map<const Eigen::VectorXd>(probs_.data(), probs_.size());
  }
  // True iff every entry is strictly positive.
  bool HasFullSupport() const;

 private:
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// A stochastic map from inputs [k] to outputs [m], stored densely as an m x k
// matrix with entry (y, x) = W(y|x). Every column sums to one.
class Channel {
 public:
  static absl::StatusOr<Channel> Create(Eigen::MatrixXd transition);

  int k() const { return static_cast<int>(w_.cols()); }
  int m() const { return static_cast<int>(w_.rows()); }
  double operator()(int y, int x) const { return w_(y, x); }
  const Eigen::MatrixXd& matrix() const { return w_; }

  // Outputs with at least one nonzero entry.
  int ReachableOutputs() const;

 private:
  explicit Channel(Eigen::MatrixXd w) : w_(std::move(w)) {}
  Eigen::MatrixXd w_;
};

enum class DivergenceKind { kTotalVariation, kKullbackLeibler, kChiSquare };

// Total variation, KL (natural log) or chi-square distance of p from q.
// KL and chi-square return kInfinity when q(x) = 0 < p(x).
absl::StatusOr<double> Divergence(const Distribution& p, const Distribution& q,
                                  DivergenceKind kind);

// Same, on raw vectors that are already known to be probability vectors.
double DivergenceUnchecked(std::span<const double> p, std::span<const double> q,
                           DivergenceKind kind);

absl::StatusOr<Distribution> ApplyChannel(const Channel& w,
                                          const Distribution& p);

struct WeightedChannel {
  Channel channel;
  double weight;
};

// Convex combination of channels. Channels with fewer outputs are padded with
// never-emitted letters so that all share the output alphabet [max m].
absl::StatusOr<Channel> MixChannels(std::span<const WeightedChannel> parts);

// One factor of a product law: a distribution, optionally pushed through a
// channel.
struct ProductFactor {
  Distribution dist;
  std::optional<Channel> channel;
};

struct ProductSpec {
  std::vector<ProductFactor> factors;
};

inline constexpr int64_t kDefaultStateCap = 10'000'000;

// The full joint law of independent factors. Outcome (y_1, ..., y_n) is stored
// at index y_1 * (m_2 ... m_n) + ... + y_n, i.e. the first factor is the most
// significant digit.
absl::StatusOr<std::vector<double>> EnumerateProduct(
    const ProductSpec& spec, int64_t state_cap = kDefaultStateCap);

// Number of joint states, or an error when it exceeds `state_cap`.
absl::StatusOr<int64_t> ProductStateCount(std::span<const int> alphabet_sizes,
                                          int64_t state_cap);

}  // namespace chicontract

#endif  // CHICONTRACT_PROB_H_
