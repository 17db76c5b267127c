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

#ifndef CHICONTRACT_IO_H_
#define CHICONTRACT_IO_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "chicontract/adversary.h"
#include "chicontract/bounds.h"
#include "chicontract/channels.h"
#include "chicontract/contraction.h"
#include "chicontract/fluctuation.h"
#include "chicontract/perturbation.h"
#include "chicontract/prob.h"
#include "chicontract/simulation.h"
#include "json.hpp"

namespace chicontract {

using Json = nlohmann::ordered_json;

// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
Json Number(double value);
absl::StatusOr<double> ParseNumber(const Json& j);

Json ToJson(const Distribution& p);
absl::StatusOr<Distribution> DistributionFromJson(const Json& j);

// {"k": K, "m": M, "W": [[W(0|0), ..., W(0|k-1)], ...]}, one row per output.
Json ToJson(const Channel& w);
absl::StatusOr<Channel> ChannelFromJson(const Json& j);

// {"q": [...], "scale": s, "zeta": "rademacher" | {"matrix_V": [[...]]}}.
// Sampled laws cannot be written.
absl::StatusOr<Json> ToJson(const PerturbedFamily& f);
absl::StatusOr<PerturbedFamily> FamilyFromJson(const Json& j);

Json ToJson(const HMatrix& h);
Json ToJson(const NormBoundCheck& check);
Json ToJson(const LdpCheck& check);
Json ToJson(const Estimate& e);
Json ToJson(const FluctuationReport& r);
Json ToJson(const MixtureStats& s);
Json ToJson(const ChaosMgf& c);
Json ToJson(const AlmostPerturbationCheck& c);
Json ToJson(const AdversaryBasis& b);
Json ToJson(const AdversaryReport& r);
Json ToJson(const MaxminGap& g);
Json ToJson(const BoundReport& r);
Json ToJson(const TrialReport& r);
Json ToJson(const BayesError& b);
Json ToJson(const SeparationDemo& d);

// task,constraint,k,eps,value,formula
std::string BoundsToCsv(std::span<const BoundReport> reports);
// state,null_count,alt_count
std::string TrialCountsToCsv(const TrialReport& r);

// {"n": N, "coin_mode": "private"|"public", "statistic": "joint"|"sum",
//  "seed": S, "assignments": [{"weight": w, "channels": [channel, ...]}]}
absl::StatusOr<ProtocolConfig> ProtocolFromJson(const Json& j);

absl::StatusOr<Json> ParseJson(std::string_view text);

}  // namespace chicontract

#endif  // CHICONTRACT_IO_H_
