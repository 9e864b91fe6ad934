/* Copyright 2026 The banz Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BANZ_VERIFY_HPP_
#define BANZ_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace banz {

struct CheckResult {
  std::string name;
  std::string values;
  std::string tolerance;
  bool passed = false;
  // Reported for information; does not affect the overall verdict.
  bool informational = false;
};

struct VerifyOptions {
  bool quick = false;
  std::uint64_t seed = 2026;
};

// Brute-force checks of the model's probabilistic identities on tiny
// problems: sharpened Jensen bound, importance-weighted predictive
// quadrature, the importance derivative versus loss covariance, the
// direction of the attention update, and gradient finite differences.
std::vector<CheckResult> run_oracle_suite(const VerifyOptions& options);

std::string format_report(const std::vector<CheckResult>& results);

// True when every non-informational check passed.
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace banz

#endif  // BANZ_VERIFY_HPP_
