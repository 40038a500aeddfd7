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
#include <optional>
#include <string>
#include <vector>

#include "stereokit/tensor.hpp"

namespace stereokit {

enum class CostKind { cosine, lnd, multihead };

const char* to_string(CostKind kind) noexcept;
/// Parses "cosine", "lnd" or "multihead".
CostKind parse_cost_kind(const std::string& name);

struct CostVolumeConfig {
  std::uint32_t max_disparity = 1;
  std::uint32_t head_num = 1;
  bool dot_scale = true;
  float epsilon = 1e-5f;
  /// G = max_disparity, Cg = head_num, Co = 1.
  GroupConvWeights pointwise;

  /// Pointwise weights 1/head_num, zero bias: the head mean of LND similarities.
  static CostVolumeConfig make(std::uint32_t max_disparity, std::uint32_t head_num,
                               bool dot_scale = true, float epsilon = 1e-5f);

  /// Throws unless the config applies to tensors of the given extents.
  void validate(const Dims& dims) const;
};

struct CostVolume {
  Tensor values;  // [N, max_disparity, H, W]
  CostKind kind = CostKind::cosine;
};

/// Positional encodings added to the layer-normalised features before the
/// disparity loop. Each tensor is [1, C, H, W] or [N, C, H, W], in [0, 1].
struct EncodingInjection {
  const Tensor& left;
  const Tensor& right;
};

/// Scratch buffers for the multi-head path; reusing one across calls keeps
/// the hot loop allocation free.
struct MultiHeadWorkspace {
  LayerNormParams norm;
  Tensor left_norm;
  Tensor right_norm;
  Tensor similarity;  // [N, max_disparity * head_num, H, W]
};

/// Cosine similarity a.b / (|a||b|) per pixel for roll offsets 0..d-1. Zero-norm
/// pixel vectors score 0.
CostVolume cost_volume_cosine(const Tensor& left, const Tensor& right, std::uint32_t max_disparity);
void cost_volume_cosine_into(const Tensor& left, const Tensor& right, std::uint32_t max_disparity,
                             CostVolume& out);

/// Layer-norm both inputs once, then plain dot products per offset.
CostVolume cost_volume_lnd(const Tensor& left, const Tensor& right, std::uint32_t max_disparity,
                           const LayerNormParams& p);

CostVolume multi_head_cost_volume(const Tensor& left, const Tensor& right,
                                  const CostVolumeConfig& cfg,
                                  std::optional<EncodingInjection> rpe = std::nullopt);
void multi_head_cost_volume_into(const Tensor& left, const Tensor& right,
                                 const CostVolumeConfig& cfg,
                                 std::optional<EncodingInjection> rpe, MultiHeadWorkspace& ws,
                                 CostVolume& out);

/// The disparity loop of the multi-head volume on already-normalised
/// features: grouped head dot products, then one group-pointwise conv.
void multi_head_from_normalized(const Tensor& left_norm, const Tensor& right_norm,
                                const CostVolumeConfig& cfg, Tensor& similarity,
                                CostVolume& out);

/// Winner-take-all readout [N,1,H,W]; ties go to the smallest disparity.
Tensor argmax_disparity(const CostVolume& cv);

/// [N, d, H, W] mask with 1 where the roll did not wrap (w >= i).
Tensor wrap_validity_mask(const Dims& input, std::uint32_t max_disparity);

struct MacCount {
  std::uint64_t multiply_accumulates = 0;
  CostKind kind = CostKind::cosine;
  std::uint64_t channels = 0;
  std::uint64_t height = 0;
  std::uint64_t width = 0;
  std::uint64_t max_disparity = 0;
  std::uint64_t heads = 0;
};

/// cosine: 3CHWd. lnd/multihead: 2 layer norms at 3CHW each plus CHWd dots.
/// The head-fusion convolution is not part of this count.
MacCount mac_count(CostKind kind, std::uint64_t channels, std::uint64_t height,
                   std::uint64_t width, std::uint64_t max_disparity, std::uint64_t heads);

/// key=value sidecar lines describing a serialised cost volume.
std::string cost_volume_metadata(const CostVolume& cv, std::uint32_t heads, bool dot_scale);

}  // namespace stereokit
