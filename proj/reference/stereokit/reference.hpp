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

// Scalar reference transcriptions used as oracles by the test suites and the
// `check` command. Nothing here calls into the optimised operators: each
// routine re-derives its result with plain loops in double precision.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stereokit/costvol.hpp"
#include "stereokit/geometry.hpp"
#include "stereokit/tensor.hpp"

namespace stereokit::reference {

/// Multiply-accumulate tallies of the instrumented oracles.
struct MacCounter {
  std::uint64_t normalization = 0;  // layer norm: mean, variance, affine per element
  std::uint64_t similarity = 0;     // dot products and squared norms
  std::uint64_t fusion = 0;         // head-fusion pointwise conv

  std::uint64_t cost_volume() const noexcept { return normalization + similarity; }
};

/// Composes `offset` single-column rolls.
Tensor roll_stepwise(const Tensor& t, std::size_t offset);

/// ((x - mean) / sqrt(var + eps)) * gamma + beta with population variance.
std::vector<double> layer_norm_vector(std::span<const double> x, std::span<const float> gamma,
                                      std::span<const float> beta, double epsilon,
                                      MacCounter* counter = nullptr);

Tensor group_conv_loops(const Tensor& t, const GroupConvWeights& w);
Tensor subsample_mean(const Tensor& t);
/// Forward-difference gradients, trailing edge zero.
std::pair<Tensor, Tensor> gradient_loops(const Tensor& t);

/// Pixel vector at (n, h, w) as doubles.
std::vector<double> pixel_vector(const Tensor& t, std::uint32_t n, std::uint32_t h,
                                 std::uint32_t w);

/// a.b / (|a||b|), 0 when either norm vanishes.
double cosine(std::span<const double> a, std::span<const double> b, MacCounter* counter = nullptr);
/// Cosine of the mean-centred vectors.
double centered_cosine(std::span<const double> a, std::span<const double> b);
double channel_variance(std::span<const double> a);

/// values[n, i, h, w] = cosine(left(h, w), right(h, (w - i) mod W)).
std::vector<double> cosine_cost_volume(const Tensor& left, const Tensor& right,
                                       std::uint32_t max_disparity,
                                       MacCounter* counter = nullptr);

/// Literal loop transcription of the multi-head cost volume: layer norm,
/// optional encoding addition, then per disparity a materialised roll, per
/// head slice dot products, dot scale, and the per-disparity pointwise conv.
std::vector<double> multi_head_loops(const Tensor& left, const Tensor& right,
                                     const CostVolumeConfig& cfg,
                                     const Tensor* left_encoding = nullptr,
                                     const Tensor* right_encoding = nullptr,
                                     MacCounter* counter = nullptr);

Tensor argmax_loops(const Tensor& cost);

/// Hand-written 3x3 products.
Mat3 matmul(const Mat3& a, const Mat3& b);
Vec3 matvec(const Mat3& a, const Vec3& v);
Pixel map_pixel(const Mat3& h, Pixel q);

/// Scalar channel value of the 2D sinusoidal encoding.
double encoding_channel(std::uint32_t i, double x, double y, double frequency, double base);

/// Plain transcription of the pyramid depth loss.
double depth_loss_loops(const Tensor& pred, const Tensor& gt, double beta);

/// max |a - b| over two equally sized sequences.
double max_abs_diff(std::span<const float> a, std::span<const double> b);
double max_abs_diff(std::span<const float> a, std::span<const float> b);

}  // namespace stereokit::reference
