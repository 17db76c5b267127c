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

#include "chicontract/prob.h"

#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace chicontract {

absl::StatusOr<Distribution> Distribution::Create(std::vector<double> probs) {
  if (probs.empty()) {
    return absl::InvalidArgumentError("distribution must have k >= 1");
  }
  double total = 0.0;
  for (size_t x = 0; x < probs.size(); ++x) {
    const double v = probs[x];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kStochasticTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("probability at ", x, " is outside [0,1]: ", v));
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kStochasticTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", total, ", not 1"));
  }
  for (double& v : probs) v /= total;
  return Distribution(std::move(probs));
}

Distribution Distribution::Uniform(int k) {
  return Distribution(std::vector<double>(k, 1.0 / k));
}

Distribution Distribution::Delta(int k, int x) {
  std::vector<double> probs(k, 0.0);
  probs[x] = 1.0;
  return Distribution(std::move(probs));
}

bool Distribution::HasFullSupport() const {
  for (double v : probs_) {
    if (v <= 0.0) return false;
  }
  return true;
}

absl::StatusOr<Channel> Channel::Create(Eigen::MatrixXd transition) {
  if (transition.rows() < 1 || transition.cols() < 1) {
    return absl::InvalidArgumentError("channel needs k >= 1 and m >= 1");
  }
  for (Eigen::Index x = 0; x < transition.cols(); ++x) {
    double total = 0.0;
    for (Eigen::Index y = 0; y < transition.rows(); ++y) {
      const double v = transition(y, x);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kStochasticTolerance) {
        return absl::InvalidArgumentError(absl::StrCat(
            "W(", y, "|", x, ") is outside [0,1]: ", v));
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kStochasticTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("column ", x, " sums to ", total, ", not 1"));
    }
    transition.col(x) /= total;
  }
  return Channel(std::move(transition));
}

int Channel::ReachableOutputs() const {
  int reachable = 0;
  for (Eigen::Index y = 0; y < w_.rows(); ++y) {
    if ((w_.row(y).array() > 0.0).any()) ++reachable;
  }
  return reachable;
}

double DivergenceUnchecked(std::span<const double> p, std::span<const double> q,
                           DivergenceKind kind) {
  double acc = 0.0;
  switch (kind) {
    case DivergenceKind::kTotalVariation:
      for (size_t x = 0; x < p.size(); ++x) acc += std::abs(p[x] - q[x]);
      return acc / 2.0;
    case DivergenceKind::kKullbackLeibler:
      for (size_t x = 0; x < p.size(); ++x) {
        if (p[x] == 0.0) continue;
        if (q[x] == 0.0) return kInfinity;
        acc += p[x] * std::log(p[x] / q[x]);
      }
      // Rounding can push a zero divergence slightly negative.
      return std::max(acc, 0.0);
    case DivergenceKind::kChiSquare:
      for (size_t x = 0; x < p.size(); ++x) {
        if (q[x] == 0.0) {
          if (p[x] > 0.0) return kInfinity;
          continue;
        }
        const double d = p[x] - q[x];
        acc += d * d / q[x];
      }
      return acc;
  }
  return acc;
}

absl::StatusOr<double> Divergence(const Distribution& p, const Distribution& q,
                                  DivergenceKind kind) {
  if (p.k() != q.k()) {
    return absl::InvalidArgumentError(
        absl::StrCat("alphabet mismatch: ", p.k(), " vs ", q.k()));
  }
  return DivergenceUnchecked(p.probs(), q.probs(), kind);
}

absl::StatusOr<Distribution> ApplyChannel(const Channel& w,
                                          const Distribution& p) {
  if (w.k() != p.k()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "channel expects k=", w.k(), " but distribution has k=", p.k()));
  }
  Eigen::VectorXd out = w.matrix() * p.AsVector();
  return Distribution::Create(std::vector<double>(out.begin(), out.end()));
}

absl::StatusOr<Channel> MixChannels(std::span<const WeightedChannel> parts) {
  if (parts.empty()) return absl::InvalidArgumentError("nothing to mix");
  const int k = parts.front().channel.k();
  int m = 0;
  double total = 0.0;
  for (const WeightedChannel& part : parts) {
    if (part.channel.k() != k) {
      return absl::InvalidArgumentError("channels disagree on input alphabet");
    }
    if (!(part.weight >= 0.0)) {
      return absl::InvalidArgumentError("mixture weights must be nonnegative");
    }
    m = std::max(m, part.channel.m());
    total += part.weight;
  }
  if (std::abs(total - 1.0) > kStochasticTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("mixture weights sum to ", total, ", not 1"));
  }
  Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(m, k);
  for (const WeightedChannel& part : parts) {
    mixed.topRows(part.channel.m()) += part.weight * part.channel.matrix();
  }
  return Channel::Create(std::move(mixed));
}

absl::StatusOr<int64_t> ProductStateCount(std::span<const int> alphabet_sizes,
                                          int64_t state_cap) {
  int64_t states = 1;
  for (int m : alphabet_sizes) {
    if (m < 1) return absl::InvalidArgumentError("empty alphabet");
    if (states > state_cap / m) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "joint state space exceeds the cap of ", state_cap, " states"));
    }
    states *= m;
  }
  return states;
}

absl::StatusOr<std::vector<double>> EnumerateProduct(const ProductSpec& spec,
                                                     int64_t state_cap) {
  if (spec.factors.empty()) {
    return absl::InvalidArgumentError("product needs at least one factor");
  }
  std::vector<std::vector<double>> marginals;
  std::vector<int> sizes;
  for (const ProductFactor& factor : spec.factors) {
    if (factor.channel.has_value()) {
      absl::StatusOr<Distribution> out = ApplyChannel(*factor.channel, factor.dist);
      if (!out.ok()) return out.status();
      marginals.emplace_back(out->probs().begin(), out->probs().end());
    } else {
      marginals.emplace_back(factor.dist.probs().begin(), factor.dist.probs().end());
    }
    sizes.push_back(static_cast<int>(marginals.back().size()));
  }
  absl::StatusOr<int64_t> states = ProductStateCount(sizes, state_cap);
  if (!states.ok()) return states.status();

  std::vector<double> joint{1.0};
  joint.reserve(*states);
  for (const std::vector<double>& marginal : marginals) {
    std::vector<double> next(joint.size() * marginal.size());
    for (size_t i = 0; i < joint.size(); ++i) {
      for (size_t y = 0; y < marginal.size(); ++y) {
        next[i * marginal.size() + y] = joint[i] * marginal[y];
      }
    }
    joint = std::move(next);
  }
  return joint;
}

}  // namespace chicontract
