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

#ifndef CHICONTRACT_SIMULATION_H_
#define CHICONTRACT_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "chicontract/perturbation.h"
#include "chicontract/prob.h"

namespace chicontract {

enum class CoinMode { kPrivate, kPublic };
const char* CoinModeName(CoinMode mode);

// One channel per player.
struct ChannelAssignment {
  std::vector<Channel> channels;
  double weight = 1.0;
};

// How the players' randomness selects their channels. A draw u picks
// assignments[u] with probability proportional to its weight. Under public
// coins one shared draw U fixes every player's channel (player i uses
// assignments[U].channels[i]). Under private coins player i makes its own
// draw U_i and uses assignments[U_i].channels[i]. A single assignment gives
// fixed channels in either mode.
struct ChannelRule {
  std::vector<ChannelAssignment> assignments;
};

enum class Statistic {
  kJoint,  // the full message vector (and U under public coins)
  kSum,    // sum of the message indices (and U under public coins)
};
const char* StatisticName(Statistic statistic);

struct ProtocolConfig {
  int n = 1;
  CoinMode coin_mode = CoinMode::kPrivate;
  ChannelRule rule;
  uint64_t seed = 0;
  Statistic statistic = Statistic::kJoint;
  // Largest number of recorded states kept as a dense histogram.
  int64_t state_cap = 1'000'000;
  // Exact oracle budget; the exact fields are left empty above it.
  int64_t exact_state_cap = kDefaultStateCap;
};

absl::Status ValidateProtocol(const ProtocolConfig& cfg, int k);

struct TrialReport {
  std::string schema = "trial-report/1";
  int64_t trials = 0;
  uint64_t seed = 0;
  CoinMode coin_mode = CoinMode::kPrivate;
  Statistic statistic = Statistic::kJoint;
  int n = 0;
  int64_t state_count = 0;
  // Per-state counts for the null and the alternative arm.
  std::vector<int64_t> null_counts;
  std::vector<int64_t> alt_counts;
  double empirical_tv = 0.0;
  double empirical_tv_stderr = 0.0;
  std::optional<double> exact_tv;
  std::optional<double> bayes_error;
  // Parameter draws rejected because p_Z left the simplex.
  int64_t rejected_parameters = 0;
};

// Runs `trials` independent trials of each arm. The null arm draws
// X_i ~ null_dist; the alternative arm draws Z ~ zeta once per trial
// (rejecting and redrawing members outside the simplex) and X_i ~ p_Z. Each
// player pushes X_i through its channel; channel outputs use private
// randomness. Every random draw comes from the substream of
// (seed, trial, player, purpose), so the report is bitwise reproducible.
absl::StatusOr<TrialReport> SimulateSmp(const ProtocolConfig& cfg,
                                        const Distribution& null_dist,
                                        const PerturbedFamily& alt, int64_t trials);

struct BayesError {
  double tv = 0.0;
  double bayes_error = 0.5;
};

// d_TV between the alternative mixture and the nominal product for fixed
// channels, and (1 - tv) / 2.
absl::StatusOr<BayesError> ExactBayesError(std::span<const Channel> channels,
                                           const PerturbedFamily& family, int n,
                                           int64_t state_cap = kDefaultStateCap);

// The same for a protocol: under public coins the referee also sees U, so the
// distance is E_U[tv_U]; under private coins each player's channel is the
// mixture of its candidates.
absl::StatusOr<BayesError> ExactProtocolBayesError(
    const ProtocolConfig& cfg, const Distribution& null_dist,
    const PerturbedFamily& alt, int64_t state_cap = kDefaultStateCap);

// Plug-in total variation between two count vectors over the same states,
// with a delta-method standard error.
struct TvEstimate {
  double tv = 0.0;
  double std_error = 0.0;
};
TvEstimate EmpiricalTv(std::span<const int64_t> a, std::span<const int64_t> b);

// Public versus private coins for l = 1 at small k. Candidates are the 2^{k/2}
// deterministic pair-partition channels.
//  * private side: for every fixed assignment of candidates to the n players,
//    the bottom-eigenspace family for that assignment is built and the exact
//    tv of its mixture is computed; the largest such tv is reported.
//  * public side: the Paninski family under a shared uniformly random
//    assignment, averaged over U.
struct SeparationDemo {
  int k = 0;
  int n = 0;
  double eps = 0.0;
  int64_t assignments = 0;
  double private_best_tv = 0.0;
  std::vector<int> private_best_assignment;  // candidate index per player
  double public_tv = 0.0;
  bool separated = false;  // private_best_tv < public_tv
};

absl::StatusOr<SeparationDemo> RunSeparationDemo(int k, int n, double eps);

}  // namespace chicontract

#endif  // CHICONTRACT_SIMULATION_H_
