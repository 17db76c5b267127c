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

#ifndef CHICONTRACT_BOUNDS_H_
#define CHICONTRACT_BOUNDS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "chicontract/channels.h"
#include "chicontract/perturbation.h"
#include "chicontract/prob.h"

namespace chicontract {

enum class BoundTask { kLearning, kTestingPublic, kTestingPrivate };

const char* BoundTaskName(BoundTask task);

// An order-level sample-complexity lower bound evaluated with constant 1.
struct BoundReport {
  BoundTask task;
  std::string constraint;
  int k = 0;
  double eps = 0.0;
  double sup_nuclear = 0.0;
  double sup_frobenius = 0.0;
  double value = 0.0;
  std::string formula;
  std::vector<std::string> caveats;
};

// learning:        (k / eps^2) (k / sup_nuclear)
// testing_public:  (sqrt(k) / eps^2) (sqrt(k) / sup_frobenius)
// testing_private: (sqrt(k) / eps^2) (k / sup_nuclear)
// `sup_frobenius` is a bound on ||H(W)||_F, not its square.
absl::StatusOr<BoundReport> LbGeneral(BoundTask task, int k, double eps,
                                      double sup_nuclear, double sup_frobenius);

// Norm suprema used for one constraint row of the table. Communication rows
// use min(2^l, k) and min(2^{l/2}, sqrt(k)); privacy rows use (e^rho - 1)^2 / 2
// for both.
struct TableSuprema {
  double nuclear;
  double frobenius;
  std::vector<std::string> caveats;
};
absl::StatusOr<TableSuprema> TableNormSuprema(int k, const ConstraintSpec& spec);

// The three cells per requested constraint, communication first.
absl::StatusOr<std::vector<BoundReport>> LbTable(int k, double eps,
                                                 std::optional<int> bits,
                                                 std::optional<double> rho);

// (ln |P| - ln C_eps) / fluct with fluct the chi-square fluctuation of the
// family, or the largest induced chi-square fluctuation over `channels` when
// given. |P| is the number of atoms of the family's linear law and C_eps is
// passed as log2. Returns +infinity when the fluctuation vanishes.
absl::StatusOr<double> FanoLearningBound(
    const PerturbedFamily& family, std::optional<std::span<const Channel>> channels,
    double log2_packing);

// log2 sum_{j <= t} C(m, j), summed exactly.
absl::StatusOr<double> HammingBallLog2(int m, int t);

// -x log2 x - (1 - x) log2 (1 - x) for x in [0, 1].
double BinaryEntropy(double x);

}  // namespace chicontract

#endif  // CHICONTRACT_BOUNDS_H_
