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

#ifndef CHICONTRACT_CHANNELS_H_
#define CHICONTRACT_CHANNELS_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "chicontract/prob.h"
#include "chicontract/rng.h"

namespace chicontract {

// A local information constraint on the players' channels: at most `bits`
// bits of output, or rho-local differential privacy.
struct ConstraintSpec {
  enum class Kind { kCommunication, kPrivacy };
  Kind kind;
  int bits = 0;
  double rho = 0.0;

  static ConstraintSpec Communication(int bits) {
    return {Kind::kCommunication, bits, 0.0};
  }
  static ConstraintSpec Privacy(double rho) { return {Kind::kPrivacy, 0, rho}; }

  // Privacy norm bounds are stated for rho in (0, 1]; larger rho is allowed
  // but downstream reports carry a caveat.
  bool OutsidePrivacyRegime() const {
    return kind == Kind::kPrivacy && rho > 1.0;
  }
  std::string ToString() const;
};

absl::Status ValidateConstraint(const ConstraintSpec& spec);

// Input x is stored at index x-1 throughout: pairs (2i-1, 2i) of the
// one-based alphabet are indices (2i-2, 2i-1).
absl::StatusOr<Channel> IdentityChannel(int k);
// W(y|x) = 1/m for all x.
absl::StatusOr<Channel> ConstantChannel(int k, int m = 2);
// y = x mod 2 on the one-based alphabet.
absl::StatusOr<Channel> ParityChannel(int k);
// Deterministic interval quantizer onto 2^bits letters: index x goes to
// floor(x * 2^bits / k).
absl::StatusOr<Channel> QuantizerChannel(int k, int bits);
// k-ary randomized response: e^rho/(e^rho+k-1) on the diagonal and
// 1/(e^rho+k-1) elsewhere.
absl::StatusOr<Channel> RandomizedResponseChannel(int k, double rho);
// Deterministic one-bit channel that splits every input pair: for pair i the
// odd member maps to 1 when `signs[i] > 0`, the even member otherwise.
absl::StatusOr<Channel> PairPartitionChannel(std::span<const int> signs);

// Looks up a standard channel by name. `param` is bits for "quantizer", rho
// for "randomized_response" and m for "constant"; other names ignore it.
absl::StatusOr<Channel> StandardChannel(std::string_view name, int k,
                                        double param = 0.0);

struct LdpCheck {
  bool satisfied;
  // max over y, x1, x2 of W(y|x1)/W(y|x2), with 0/0 = 1 and a/0 = infinity.
  double worst_ratio;
};

// Ratios are compared against e^rho with a relative slack of 1e-12.
LdpCheck CheckLdp(const Channel& w, double rho);

// True iff at most 2^bits outputs are ever emitted.
bool CheckComm(const Channel& w, int bits);

// True iff `w` satisfies `spec`.
bool SatisfiesConstraint(const Channel& w, const ConstraintSpec& spec);

// Random column-stochastic m x k matrix. Columns are normalized exponentials
// with a random temperature, so the draws range from nearly deterministic to
// nearly constant channels.
absl::StatusOr<Channel> RandomChannel(int k, int m, CounterRng& rng);

// Random channel with 2^bits outputs.
absl::StatusOr<Channel> RandomCommChannel(int k, int bits, CounterRng& rng);

// Random rho-LDP channel with m outputs: rows are pushed into the band
// [min, min * e^rho] and columns renormalized until the constraint holds; the
// result is then shrunk towards the constant channel if needed. Always passes
// CheckLdp(., rho).
absl::StatusOr<Channel> RandomLdpChannel(int k, int m, double rho,
                                         CounterRng& rng);

}  // namespace chicontract

#endif  // CHICONTRACT_CHANNELS_H_
