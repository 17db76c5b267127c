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

#ifndef CHICONTRACT_VERIFY_H_
#define CHICONTRACT_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

namespace chicontract {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  int64_t cases = 0;
  std::string detail;
};

struct VerifyResult {
  std::vector<VerifyCheck> checks;
  bool all_pass = false;
};

// Runs the invariant suite over every module on seeded random instances.
// `quick` shrinks instance counts so the suite finishes in a few seconds.
VerifyResult RunVerification(bool quick, uint64_t seed = 20260101);

}  // namespace chicontract

#endif  // CHICONTRACT_VERIFY_H_
