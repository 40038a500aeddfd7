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

#include "stereokit/losses.hpp"

#include <cmath>

#include "json.hpp"

#include "stereokit/error.hpp"
#include "stereokit/random.hpp"

namespace stereokit {
namespace {

void check_same(const Tensor& a, const Tensor& b, const char* what) {
  require(a.dims() == b.dims(), ErrorCode::shape_mismatch,
          std::string(what) + ": prediction " + to_string(a.dims()) + " and ground truth " +
              to_string(b.dims()) + " differ");
}

double smooth_l1_term(double e, double beta) {
  const double a = std::abs(e);
  return a < beta ? 0.5 * e * e / beta : a - 0.5 * beta;
}

}  // namespace

double smooth_l1(const Tensor& pred, const Tensor& gt, double beta) {
  check_same(pred, gt, "smooth_l1");
  require(beta > 0.0, ErrorCode::invalid_argument, "smooth_l1 beta must be > 0");
  auto p = pred.data();
  auto g = gt.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += smooth_l1_term(double(p[i]) - g[i], beta);
  return sum / static_cast<double>(p.size());
}

LossBreakdown depth_loss(const Tensor& pred, const Tensor& gt, double beta) {
  check_same(pred, gt, "depth_loss");
  LossBreakdown out;
  const double base = smooth_l1(gt, pred, beta);
  out.terms.emplace_back("base_smooth_l1", base);
  out.total = base;

  Tensor level_gt = gt;
  Tensor level_pred = pred;
  bool exhausted = false;
  for (int level = 0; level <= 4; ++level) {
    if (level > 0 && !exhausted) {
      if (level_gt.dims().h >= 2 && level_gt.dims().w >= 2) {
        level_gt = subsample2(level_gt);
        level_pred = subsample2(level_pred);
      } else {
        exhausted = true;
      }
    }
    const Dims& d = level_gt.dims();
    if (exhausted || d.h < 2 || d.w < 2) {
      exhausted = true;
      out.skipped_levels.push_back(level);
      continue;
    }
    auto [gx_gt, gy_gt] = spatial_gradient(level_gt);
    auto [gx_pred, gy_pred] = spatial_gradient(level_pred);
    const double term =
        0.5 * (smooth_l1(gx_gt, gx_pred, beta) + smooth_l1(gy_gt, gy_pred, beta));
    out.terms.emplace_back("grad_level_" + std::to_string(level), term);
    out.total += term;
  }
  return out;
}

double homography_loss(const Mat3& pred, const Mat3& gt, double w) {
  require(w > 0.0, ErrorCode::invalid_argument, "homography loss weight must be > 0");
  Mat3 weight;
  weight << w, w, 1.0, w, w, 1.0, 1.0, 1.0, w;
  return weight.cwiseProduct(gt - pred).norm();
}

double homography_loss(const Homography& pred, const Homography& gt, double w) {
  return homography_loss(pred.matrix(), gt.matrix(), w);
}

double combined_loss(double l_h, double l_d, const UncertaintyParams& u) {
  require(u.sigma_h > 0.0 && u.sigma_d > 0.0, ErrorCode::invalid_argument,
          "uncertainty sigmas must be > 0");
  require(l_h >= 0.0 && l_d >= 0.0, ErrorCode::invalid_argument,
          "task losses must be non-negative");
  return l_h / (2.0 * u.sigma_h * u.sigma_h) + l_d / (2.0 * u.sigma_d * u.sigma_d) +
         std::log(u.sigma_h * u.sigma_d);
}

MetricsReport depth_metrics(const Tensor& pred, const Tensor& gt, const Tensor* mask) {
  check_same(pred, gt, "depth_metrics");
  if (mask) check_same(*mask, gt, "depth_metrics mask");
  auto p = pred.data();
  auto g = gt.data();
  double rel = 0.0;
  double rel_abs = 0.0;
  double sq = 0.0;
  std::uint64_t inliers = 0;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (mask && mask->data()[i] == 0.0f) continue;
    require(g[i] > 0.0f, ErrorCode::invalid_argument,
            "ground truth must be > 0 on every valid pixel (index " + std::to_string(i) + ")");
    const double err = double(p[i]) - double(g[i]);
    const double r = err / g[i];
    rel += r;
    rel_abs += std::abs(r);
    sq += err * err;
    // Small slack so exact 5% errors survive float rounding of pred.
    if (std::abs(r) <= 0.05 + 1e-7) ++inliers;
    ++count;
  }
  require(count > 0, ErrorCode::invalid_argument, "depth_metrics: no valid pixels");
  MetricsReport m;
  const double n = static_cast<double>(count);
  m.abs_rel = rel / n;
  m.abs_rel_abs = rel_abs / n;
  m.d1 = static_cast<double>(inliers) / n;
  m.d1_outlier = 1.0 - m.d1;
  m.rmse = std::sqrt(sq / n);
  m.pixel_count = count;
  return m;
}

ProbeReport local_optimality_probe(const std::function<double(std::span<const double>)>& loss,
                                   std::span<const double> point, double radius,
                                   std::uint32_t trials, std::uint64_t seed) {
  require(radius > 0.0, ErrorCode::invalid_argument, "probe radius must be > 0");
  require(trials >= 1, ErrorCode::invalid_argument, "probe needs at least one trial");
  require(!point.empty(), ErrorCode::invalid_argument, "probe point must be non-empty");
  ProbeReport r;
  r.base_loss = loss(point);
  r.trials = trials;
  Sampler rng(seed);
  std::vector<double> probe(point.size());
  std::vector<double> dir(point.size());
  const double dim = static_cast<double>(point.size());
  for (std::uint32_t t = 0; t < trials; ++t) {
    double norm = 0.0;
    for (double& v : dir) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double magnitude = radius * std::pow(rng.uniform(), 1.0 / dim);
    for (std::size_t i = 0; i < point.size(); ++i) {
      probe[i] = point[i] + (norm > 0.0 ? dir[i] / norm : 0.0) * magnitude;
    }
    if (loss(probe) >= r.base_loss) ++r.not_lower;
  }
  r.fraction_not_lower = static_cast<double>(r.not_lower) / trials;
  return r;
}

std::string to_json(const LossBreakdown& b) {
  nlohmann::json j;
  j["total"] = b.total;
  for (const auto& [name, value] : b.terms) j[name] = value;
  j["skipped_levels"] = b.skipped_levels;
  return j.dump();
}

std::string to_json(const MetricsReport& m) {
  nlohmann::json j{{"abs_rel", m.abs_rel},   {"abs_rel_abs", m.abs_rel_abs},
                   {"d1", m.d1},             {"d1_outlier", m.d1_outlier},
                   {"rmse", m.rmse},         {"pixel_count", m.pixel_count}};
  return j.dump();
}

}  // namespace stereokit
