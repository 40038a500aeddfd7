/* Copyright (c) 2026 The stereokit Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stereokit {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckOptions {
  std::uint32_t bench_reps = 25;
  std::uint64_t seed = 20240521;
};

/// Runs the acceptance property suite, one result per check in id order.
/// The final entry asserts the whole suite finished inside its time budget.
/// `progress`, when set, is called after each check completes.
std::vector<CheckResult> run_checks(const CheckOptions& opts = {},
                                    const std::function<void(const CheckResult&)>& progress = {});

/// Individual checks, also used directly by the test suites.
CheckResult check_multihead_oracle(const CheckOptions& opts);
CheckResult check_lnd_fidelity(const CheckOptions& opts);
CheckResult check_mac_algebra(const CheckOptions& opts);
CheckResult check_latency_direction(const CheckOptions& opts);
CheckResult check_rpe(const CheckOptions& opts);
CheckResult check_homography(const CheckOptions& opts);
CheckResult check_losses(const CheckOptions& opts);
CheckResult check_sensitivity(const CheckOptions& opts);

/// Mean disparity error without encodings minus the error with them, on the
/// misaligned scene. The demo passes only when the gain exceeds this bar.
inline constexpr double kDemoRpeMinGain = 0.0;

/// Seconds allowed for the whole suite.
inline constexpr double kSuiteBudgetSeconds = 300.0;

/// One "PASS  [id] name (seconds): detail" line, no newline.
std::string format_check_row(const CheckResult& r);
std::string format_check_table(const std::vector<CheckResult>& results);

}  // namespace stereokit
