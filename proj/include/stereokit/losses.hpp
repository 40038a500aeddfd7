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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stereokit/geometry.hpp"
#include "stereokit/tensor.hpp"

namespace stereokit {

struct LossBreakdown {
  double total = 0.0;
  /// Named terms in evaluation order; total is their sum.
  std::vector<std::pair<std::string, double>> terms;
  /// Pyramid levels dropped because the map shrank below 2x2.
  std::vector<int> skipped_levels;
};

struct UncertaintyParams {
  double sigma_h = 1.0;
  double sigma_d = 1.0;
};

struct MetricsReport {
  double abs_rel = 0.0;      // mean((pred - gt) / gt), signed
  double abs_rel_abs = 0.0;  // mean(|pred - gt| / gt)
  double d1 = 0.0;           // fraction with |pred - gt| / gt <= 5%
  double d1_outlier = 0.0;   // 1 - d1
  double rmse = 0.0;
  std::uint64_t pixel_count = 0;
};

/// Mean over elements of 0.5 e^2 / beta for |e| < beta, else |e| - 0.5 beta.
double smooth_l1(const Tensor& pred, const Tensor& gt, double beta = 1.0);

/// Base SmoothL1 plus gradient SmoothL1 on five 2x2-subsampled pyramid levels;
/// each gradient term averages its x and y components.
LossBreakdown depth_loss(const Tensor& pred, const Tensor& gt, double beta = 1.0);

/// Frobenius norm of the elementwise-weighted difference, with weight `w` on
/// the upper-left 2x2 block and the (3,3) element, 1 elsewhere.
double homography_loss(const Mat3& pred, const Mat3& gt, double w = 50.0);
double homography_loss(const Homography& pred, const Homography& gt, double w = 50.0);

/// l_h / (2 sigma_h^2) + l_d / (2 sigma_d^2) + log(sigma_h sigma_d).
double combined_loss(double l_h, double l_d, const UncertaintyParams& u);

/// Pixels where `mask` is zero are excluded.
MetricsReport depth_metrics(const Tensor& pred, const Tensor& gt,
                            const Tensor* mask = nullptr);

struct ProbeReport {
  double base_loss = 0.0;
  std::uint32_t trials = 0;
  std::uint32_t not_lower = 0;
  double fraction_not_lower = 0.0;
};

/// Samples `trials` points uniformly in the ball of `radius` around `point`
/// and reports how often the loss does not drop below loss(point).
ProbeReport local_optimality_probe(const std::function<double(std::span<const double>)>& loss,
                                   std::span<const double> point, double radius,
                                   std::uint32_t trials, std::uint64_t seed);

std::string to_json(const LossBreakdown& b);
std::string to_json(const MetricsReport& m);

}  // namespace stereokit
