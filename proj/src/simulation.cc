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

#include "chicontract/simulation.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "chicontract/adversary.h"
#include "chicontract/channels.h"
#include "chicontract/contraction.h"
#include "chicontract/fluctuation.h"
#include "chicontract/rng.h"

namespace chicontract {
namespace {

constexpr int kMaxParameterAttempts = 1000;

std::vector<double> AssignmentWeights(const ChannelRule& rule) {
  double total = 0.0;
  for (const ChannelAssignment& a : rule.assignments) total += a.weight;
  std::vector<double> weights;
  weights.reserve(rule.assignments.size());
  for (const ChannelAssignment& a : rule.assignments) weights.push_back(a.weight / total);
  return weights;
}

// Output alphabet size seen by each player across all assignments.
std::vector<int> PlayerAlphabets(const ProtocolConfig& cfg) {
  std::vector<int> m(cfg.n, 0);
  for (const ChannelAssignment& a : cfg.rule.assignments) {
    for (int i = 0; i < cfg.n; ++i) m[i] = std::max(m[i], a.channels[i].m());
  }
  return m;
}

// Maps (u, y_1, ..., y_n) to a recorded state.
class StateEncoder {
 public:
  static absl::StatusOr<StateEncoder> Create(const ProtocolConfig& cfg) {
    StateEncoder enc;
    enc.statistic_ = cfg.statistic;
    enc.alphabets_ = PlayerAlphabets(cfg);
    const int64_t u_count = cfg.coin_mode == CoinMode::kPublic
                                ? static_cast<int64_t>(cfg.rule.assignments.size())
                                : 1;
    int64_t per_u = 1;
    if (cfg.statistic == Statistic::kJoint) {
      absl::StatusOr<int64_t> count = ProductStateCount(enc.alphabets_, cfg.state_cap);
      if (!count.ok()) {
        return absl::ResourceExhaustedError(absl::StrCat(
            "message space exceeds ", cfg.state_cap,
            " states; use the sum statistic instead"));
      }
      per_u = *count;
    } else {
      for (int m : enc.alphabets_) per_u += m - 1;
    }
    if (per_u > cfg.state_cap / u_count) {
      return absl::ResourceExhaustedError(
          absl::StrCat("recorded state space exceeds ", cfg.state_cap, " states"));
    }
    enc.per_u_ = per_u;
    enc.total_ = per_u * u_count;
    return enc;
  }

  int64_t total() const { return total_; }

  int64_t Encode(int u, std::span<const int> y) const {
    int64_t index = 0;
    if (statistic_ == Statistic::kJoint) {
      for (size_t i = 0; i < y.size(); ++i) index = index * alphabets_[i] + y[i];
    } else {
      for (int v : y) index += v;
    }
    return u * per_u_ + index;
  }

 private:
  Statistic statistic_ = Statistic::kJoint;
  std::vector<int> alphabets_;
  int64_t per_u_ = 1;
  int64_t total_ = 1;
};

std::span<const double> Column(const Channel& w, int x) {
  return {w.matrix().col(x).data(), static_cast<size_t>(w.m())};
}

}  // namespace

const char* CoinModeName(CoinMode mode) {
  return mode == CoinMode::kPublic ? "public" : "private";
}

const char* StatisticName(Statistic statistic) {
  return statistic == Statistic::kSum ? "sum" : "joint";
}

absl::Status ValidateProtocol(const ProtocolConfig& cfg, int k) {
  if (cfg.n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (cfg.rule.assignments.empty()) {
    return absl::InvalidArgumentError("channel rule has no assignments");
  }
  double total = 0.0;
  for (const ChannelAssignment& a : cfg.rule.assignments) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      return absl::InvalidArgumentError("assignment weights must be nonnegative");
    }
    total += a.weight;
    if (static_cast<int>(a.channels.size()) != cfg.n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "assignment has ", a.channels.size(), " channels for ", cfg.n, " players"));
    }
    for (const Channel& w : a.channels) {
      if (w.k() != k) {
        return absl::InvalidArgumentError(
            absl::StrCat("channel input alphabet ", w.k(), " differs from k=", k));
      }
    }
  }
  if (!(total > 0.0)) return absl::InvalidArgumentError("assignment weights sum to 0");
  if (cfg.state_cap < 1) return absl::InvalidArgumentError("state cap must be positive");
  return absl::OkStatus();
}

TvEstimate EmpiricalTv(std::span<const int64_t> a, std::span<const int64_t> b) {
  double na = 0.0;
  double nb = 0.0;
  for (int64_t c : a) na += c;
  for (int64_t c : b) nb += c;
  TvEstimate est;
  if (na == 0.0 || nb == 0.0) return est;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double sq_a = 0.0;
  double sq_b = 0.0;
  for (size_t s = 0; s < a.size(); ++s) {
    const double pa = a[s] / na;
    const double pb = b[s] / nb;
    est.tv += std::abs(pa - pb);
    const double sign = pa > pb ? 1.0 : (pa < pb ? -1.0 : 0.0);
    mean_a += pa * sign;
    mean_b += pb * sign;
    sq_a += pa * sign * sign;
    sq_b += pb * sign * sign;
  }
  est.tv *= 0.5;
  const double var = (sq_a - mean_a * mean_a) / na + (sq_b - mean_b * mean_b) / nb;
  est.std_error = 0.5 * std::sqrt(std::max(var, 0.0));
  return est;
}

absl::StatusOr<TrialReport> SimulateSmp(const ProtocolConfig& cfg,
                                        const Distribution& null_dist,
                                        const PerturbedFamily& alt, int64_t trials) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (null_dist.k() != alt.k()) {
    return absl::InvalidArgumentError("null and alternative disagree on k");
  }
  if (absl::Status s = ValidateProtocol(cfg, alt.k()); !s.ok()) return s;
  absl::StatusOr<StateEncoder> encoder = StateEncoder::Create(cfg);
  if (!encoder.ok()) return encoder.status();

  TrialReport report;
  report.trials = trials;
  report.seed = cfg.seed;
  report.coin_mode = cfg.coin_mode;
  report.statistic = cfg.statistic;
  report.n = cfg.n;
  report.state_count = encoder->total();
  report.null_counts.assign(encoder->total(), 0);
  report.alt_counts.assign(encoder->total(), 0);

  const std::vector<double> weights = AssignmentWeights(cfg.rule);
  const std::vector<double> null_probs(null_dist.probs().begin(), null_dist.probs().end());
  std::vector<int> u(cfg.n);
  std::vector<int> y(cfg.n);
  std::vector<double> member;

  for (int64_t t = 0; t < trials; ++t) {
    for (int arm = 0; arm < 2; ++arm) {
      const uint64_t stream = 2 * static_cast<uint64_t>(t) + arm;
      std::span<const double> input = null_probs;
      if (arm == 1) {
        int attempt = 0;
        for (;; ++attempt) {
          if (attempt == kMaxParameterAttempts) {
            return absl::FailedPreconditionError(absl::StrCat(
                "no valid family member after ", kMaxParameterAttempts, " draws"));
          }
          CounterRng rng = CounterRng::ForTrial(cfg.seed, stream, attempt,
                                                StreamPurpose::kParameter);
          const Eigen::VectorXd z = alt.zeta().Sample(rng);
          if (alt.IsValidMember(z)) {
            const Eigen::VectorXd p = alt.MemberProbs(z);
            member.assign(p.begin(), p.end());
            break;
          }
          ++report.rejected_parameters;
        }
        input = member;
      }
      if (cfg.coin_mode == CoinMode::kPublic) {
        CounterRng coin =
            CounterRng::ForTrial(cfg.seed, stream, 0, StreamPurpose::kSharedCoin);
        std::fill(u.begin(), u.end(), coin.Categorical(weights));
      } else {
        for (int i = 0; i < cfg.n; ++i) {
          CounterRng coin =
              CounterRng::ForTrial(cfg.seed, stream, i, StreamPurpose::kPrivateCoin);
          u[i] = coin.Categorical(weights);
        }
      }
      for (int i = 0; i < cfg.n; ++i) {
        CounterRng in = CounterRng::ForTrial(cfg.seed, stream, i, StreamPurpose::kInput);
        const int x = in.Categorical(input);
        CounterRng out =
            CounterRng::ForTrial(cfg.seed, stream, i, StreamPurpose::kChannelOutput);
        y[i] = out.Categorical(Column(cfg.rule.assignments[u[i]].channels[i], x));
      }
      const int shared = cfg.coin_mode == CoinMode::kPublic ? u[0] : 0;
      const int64_t state = encoder->Encode(shared, y);
      (arm == 0 ? report.null_counts : report.alt_counts)[state] += 1;
    }
  }

  const TvEstimate tv = EmpiricalTv(report.null_counts, report.alt_counts);
  report.empirical_tv = tv.tv;
  report.empirical_tv_stderr = tv.std_error;
  absl::StatusOr<BayesError> exact =
      ExactProtocolBayesError(cfg, null_dist, alt, cfg.exact_state_cap);
  if (exact.ok()) {
    report.exact_tv = exact->tv;
    report.bayes_error = exact->bayes_error;
  }
  return report;
}

absl::StatusOr<BayesError> ExactBayesError(std::span<const Channel> channels,
                                           const PerturbedFamily& family, int n,
                                           int64_t state_cap) {
  absl::StatusOr<MixtureStats> stats =
      BruteForceMixtureStats(channels, family, n, state_cap);
  if (!stats.ok()) return stats.status();
  return BayesError{stats->tv, 0.5 * (1.0 - stats->tv)};
}

absl::StatusOr<BayesError> ExactProtocolBayesError(const ProtocolConfig& cfg,
                                                   const Distribution& null_dist,
                                                   const PerturbedFamily& alt,
                                                   int64_t state_cap) {
  if (absl::Status s = ValidateProtocol(cfg, alt.k()); !s.ok()) return s;
  const std::vector<double> weights = AssignmentWeights(cfg.rule);
  double tv = 0.0;
  if (cfg.coin_mode == CoinMode::kPublic) {
    for (size_t u = 0; u < weights.size(); ++u) {
      if (weights[u] == 0.0) continue;
      absl::StatusOr<MixtureStats> stats = BruteForceMixtureStatsAgainst(
          cfg.rule.assignments[u].channels, alt, null_dist, cfg.n, state_cap);
      if (!stats.ok()) return stats.status();
      tv += weights[u] * stats->tv;
    }
  } else {
    std::vector<Channel> mixed;
    for (int i = 0; i < cfg.n; ++i) {
      std::vector<WeightedChannel> parts;
      for (size_t u = 0; u < weights.size(); ++u) {
        parts.push_back({cfg.rule.assignments[u].channels[i], weights[u]});
      }
      absl::StatusOr<Channel> w = MixChannels(parts);
      if (!w.ok()) return w.status();
      mixed.push_back(*std::move(w));
    }
    absl::StatusOr<MixtureStats> stats =
        BruteForceMixtureStatsAgainst(mixed, alt, null_dist, cfg.n, state_cap);
    if (!stats.ok()) return stats.status();
    tv = stats->tv;
  }
  return BayesError{tv, 0.5 * (1.0 - tv)};
}

absl::StatusOr<SeparationDemo> RunSeparationDemo(int k, int n, double eps) {
  if (k < 4 || k % 4 != 0 || k > 16) {
    return absl::InvalidArgumentError(
        absl::StrCat("demo needs k in {4, 8, 12, 16}, got ", k));
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  const int half = k / 2;
  std::vector<Channel> candidates;
  for (int mask = 0; mask < (1 << half); ++mask) {
    std::vector<int> signs(half);
    for (int i = 0; i < half; ++i) signs[i] = (mask >> i) & 1 ? -1 : 1;
    absl::StatusOr<Channel> w = PairPartitionChannel(signs);
    if (!w.ok()) return w.status();
    candidates.push_back(*std::move(w));
  }
  const int64_t count = static_cast<int64_t>(std::pow(candidates.size(), n));
  if (count > 100'000) {
    return absl::InvalidArgumentError(
        absl::StrCat(count, " assignments are too many to search"));
  }

  SeparationDemo demo;
  demo.k = k;
  demo.n = n;
  demo.eps = eps;
  demo.assignments = count;
  demo.private_best_tv = -1.0;

  ProtocolConfig shared;
  shared.n = n;
  shared.coin_mode = CoinMode::kPublic;
  std::vector<int> digits(n, 0);
  for (int64_t a = 0; a < count; ++a) {
    int64_t rest = a;
    std::vector<Channel> channels;
    for (int i = n - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rest % candidates.size());
      rest /= candidates.size();
    }
    for (int i = 0; i < n; ++i) channels.push_back(candidates[digits[i]]);

    absl::StatusOr<HMatrix> hbar = AverageHMatrix(channels);
    if (!hbar.ok()) return hbar.status();
    absl::StatusOr<AdversaryBasis> basis = AdversarialBasis(*hbar);
    if (!basis.ok()) return basis.status();
    absl::StatusOr<PerturbedFamily> family = GeneralFamily(
        Distribution::Uniform(k), basis->c, eps, ZetaLaw::Linear(basis->v));
    if (!family.ok()) return family.status();
    absl::StatusOr<BayesError> exact = ExactBayesError(channels, *family, n);
    if (!exact.ok()) return exact.status();
    if (exact->tv > demo.private_best_tv) {
      demo.private_best_tv = exact->tv;
      demo.private_best_assignment = digits;
    }
    shared.rule.assignments.push_back({std::move(channels), 1.0});
  }

  absl::StatusOr<PerturbedFamily> paninski = PaninskiFamily(k, eps);
  if (!paninski.ok()) return paninski.status();
  absl::StatusOr<BayesError> pub =
      ExactProtocolBayesError(shared, paninski->nominal(), *paninski);
  if (!pub.ok()) return pub.status();
  demo.public_tv = pub->tv;
  demo.separated = demo.private_best_tv < demo.public_tv;
  return demo;
}

}  // namespace chicontract
