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

#include "stereokit/costvol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stereokit/error.hpp"
#include "stereokit/parallel.hpp"

namespace stereokit {

const char* to_string(CostKind kind) noexcept {
  switch (kind) {
    case CostKind::cosine: return "cosine";
    case CostKind::lnd: return "lnd";
    case CostKind::multihead: return "multihead";
  }
  return "unknown";
}

CostKind parse_cost_kind(const std::string& name) {
  if (name == "cosine") return CostKind::cosine;
  if (name == "lnd") return CostKind::lnd;
  if (name == "multihead") return CostKind::multihead;
  fail(ErrorCode::invalid_argument,
       "unknown cost volume kind '" + name + "' (expected cosine, lnd or multihead)");
}

CostVolumeConfig CostVolumeConfig::make(std::uint32_t max_disparity, std::uint32_t head_num,
                                        bool dot_scale, float epsilon) {
  require(max_disparity >= 1, ErrorCode::invalid_argument, "max_disparity must be >= 1");
  require(head_num >= 1, ErrorCode::invalid_argument, "head_num must be >= 1");
  CostVolumeConfig cfg;
  cfg.max_disparity = max_disparity;
  cfg.head_num = head_num;
  cfg.dot_scale = dot_scale;
  cfg.epsilon = epsilon;
  cfg.pointwise = GroupConvWeights::uniform(max_disparity, head_num, 1, 1.0f / head_num);
  return cfg;
}

void CostVolumeConfig::validate(const Dims& dims) const {
  require(max_disparity >= 1, ErrorCode::invalid_argument, "max_disparity must be >= 1");
  require(max_disparity < dims.w, ErrorCode::invalid_argument,
          "max_disparity " + std::to_string(max_disparity) + " must be < width " +
              std::to_string(dims.w));
  require(head_num >= 1 && dims.c % head_num == 0, ErrorCode::invalid_argument,
          "head_num " + std::to_string(head_num) + " must divide channel count " +
              std::to_string(dims.c));
  require(epsilon > 0.0f, ErrorCode::invalid_argument, "layer norm epsilon must be positive");
  pointwise.validate();
  require(pointwise.groups == max_disparity && pointwise.in_per_group == head_num &&
              pointwise.out_per_group == 1,
          ErrorCode::shape_mismatch,
          "pointwise weights must have G = max_disparity, Cg = head_num, Co = 1");
}

namespace {

void check_pair(const Tensor& left, const Tensor& right, std::uint32_t max_disparity) {
  require(left.dims() == right.dims(), ErrorCode::shape_mismatch,
          "left " + to_string(left.dims()) + " and right " + to_string(right.dims()) +
              " extents differ");
  require(max_disparity >= 1 && max_disparity < left.dims().w, ErrorCode::invalid_argument,
          "max_disparity " + std::to_string(max_disparity) + " must be in [1, W)");
}

// Row-sized accumulators, one set per thread, reused across calls.
std::vector<float>& scratch(int slot, std::size_t size) {
  thread_local std::vector<float> buffers[3];
  auto& b = buffers[slot];
  if (b.size() < size) b.resize(size);
  return b;
}

// acc[w] += a[w] * b[(w - shift) mod W] for one channel row.
inline void accumulate_rolled_dot(const float* a, const float* b, std::uint32_t width,
                                  std::uint32_t shift, float* acc) {
  for (std::uint32_t w = 0; w < shift; ++w) acc[w] += a[w] * b[w + width - shift];
  const float* bs = b - shift;
  for (std::uint32_t w = shift; w < width; ++w) acc[w] += a[w] * bs[w];
}

// acc[w] += b[(w - shift) mod W]^2.
inline void accumulate_rolled_square(const float* b, std::uint32_t width, std::uint32_t shift,
                                     float* acc) {
  for (std::uint32_t w = 0; w < shift; ++w) {
    const float v = b[w + width - shift];
    acc[w] += v * v;
  }
  const float* bs = b - shift;
  for (std::uint32_t w = shift; w < width; ++w) acc[w] += bs[w] * bs[w];
}

// out[w] = scale * sum_c a[c][w] * b[c][w + offset_b] for w in [w0, w1).
// Accumulators for one tile stay in registers across the channel loop; the
// sum runs in channel order.
template <std::uint32_t Len>
inline void dot_tile(const float* const* a, const float* const* b, std::uint32_t channels,
                     std::ptrdiff_t offset_b, std::uint32_t w, float scale, float* out) {
  float acc[Len] = {};
  for (std::uint32_t c = 0; c < channels; ++c) {
    const float* ar = a[c] + w;
    const float* br = b[c] + w + offset_b;
#pragma GCC unroll 16
    for (std::uint32_t k = 0; k < Len; ++k) acc[k] += ar[k] * br[k];
  }
  for (std::uint32_t k = 0; k < Len; ++k) out[w + k] = acc[k] * scale;
}

void dot_range(const float* const* a, const float* const* b, std::uint32_t channels,
               std::ptrdiff_t offset_b, std::uint32_t width, float scale, float* out) {
  std::uint32_t w = 0;
  for (; w + 16 <= width; w += 16) dot_tile<16>(a, b, channels, offset_b, w, scale, out);
  for (; w + 4 <= width; w += 4) dot_tile<4>(a, b, channels, offset_b, w, scale, out);
  for (; w < width; ++w) dot_tile<1>(a, b, channels, offset_b, w, scale, out);
}

// similarity[n, i*heads + k, h, :] = scale * <left_k, roll(right, i)_k> per pixel.
void head_dots(const Tensor& left, const Tensor& right, std::uint32_t max_disparity,
               std::uint32_t heads, float scale, Tensor& similarity) {
  const Dims& d = left.dims();
  const std::uint32_t stride = d.c / heads;
  similarity.reshape(Dims{d.n, max_disparity * heads, d.h, d.w});
  const std::size_t jobs = std::size_t{d.n} * d.h;
  parallel_for(jobs, 4, [&](std::size_t begin, std::size_t end) {
    std::vector<const float*> a(d.c);
    std::vector<const float*> b(d.c);
    // Each right row stored twice back to back, so the rolled row for offset
    // i is the contiguous slice starting at W - i.
    std::vector<float> doubled(std::size_t{d.c} * 2 * d.w);
    for (std::size_t job = begin; job < end; ++job) {
      const auto h = static_cast<std::uint32_t>(job % d.h);
      const auto n = static_cast<std::uint32_t>(job / d.h);
      for (std::uint32_t c = 0; c < d.c; ++c) {
        a[c] = left.row(n, c, h).data();
        float* dst = doubled.data() + std::size_t{c} * 2 * d.w;
        const auto src = right.row(n, c, h);
        std::copy(src.begin(), src.end(), dst);
        std::copy(src.begin(), src.end(), dst + d.w);
        b[c] = dst;
      }
      for (std::uint32_t i = 0; i < max_disparity; ++i)
        for (std::uint32_t k = 0; k < heads; ++k) {
          dot_range(a.data() + k * stride, b.data() + k * stride, stride,
                    std::ptrdiff_t{d.w} - i, d.w, scale,
                    similarity.row(n, i * heads + k, h).data());
        }
    }
  });
}

void add_encoding(Tensor& features, const Tensor& encoding, const char* side) {
  const Dims& f = features.dims();
  const Dims& e = encoding.dims();
  require(e.c == f.c && e.h == f.h && e.w == f.w && (e.n == 1 || e.n == f.n),
          ErrorCode::shape_mismatch,
          std::string(side) + " encoding " + to_string(e) + " does not match features " +
              to_string(f));
  const auto values = encoding.data();
  require(std::all_of(values.begin(), values.end(), [](float v) { return v >= 0.0f && v <= 1.0f; }),
          ErrorCode::invalid_argument,
          std::string(side) + " encoding must be rescaled to [0, 1] before injection");
  const std::size_t per_batch = std::size_t{f.c} * f.h * f.w;
  auto dst = features.data();
  for (std::uint32_t n = 0; n < f.n; ++n) {
    const float* src = values.data() + (e.n == 1 ? 0 : n * per_batch);
    float* out = dst.data() + n * per_batch;
    for (std::size_t k = 0; k < per_batch; ++k) out[k] += src[k];
  }
}

}  // namespace

void cost_volume_cosine_into(const Tensor& left, const Tensor& right, std::uint32_t max_disparity,
                             CostVolume& out) {
  check_pair(left, right, max_disparity);
  const Dims& d = left.dims();
  out.kind = CostKind::cosine;
  out.values.reshape(Dims{d.n, max_disparity, d.h, d.w});
  const std::size_t jobs = std::size_t{d.n} * max_disparity * d.h;
  parallel_for(jobs, 16, [&](std::size_t begin, std::size_t end) {
    float* dot = scratch(0, d.w).data();
    float* left_sq = scratch(1, d.w).data();
    float* right_sq = scratch(2, d.w).data();
    for (std::size_t job = begin; job < end; ++job) {
      const auto h = static_cast<std::uint32_t>(job % d.h);
      const auto i = static_cast<std::uint32_t>((job / d.h) % max_disparity);
      const auto n = static_cast<std::uint32_t>(job / (std::size_t{d.h} * max_disparity));
      std::fill(dot, dot + d.w, 0.0f);
      std::fill(left_sq, left_sq + d.w, 0.0f);
      std::fill(right_sq, right_sq + d.w, 0.0f);
      // Both norms are recomputed per offset, as in the reference operator.
      for (std::uint32_t c = 0; c < d.c; ++c) {
        const float* a = left.row(n, c, h).data();
        const float* b = right.row(n, c, h).data();
        accumulate_rolled_dot(a, b, d.w, i, dot);
        for (std::uint32_t w = 0; w < d.w; ++w) left_sq[w] += a[w] * a[w];
        accumulate_rolled_square(b, d.w, i, right_sq);
      }
      float* dst = out.values.row(n, i, h).data();
      for (std::uint32_t w = 0; w < d.w; ++w) {
        const float denom = left_sq[w] * right_sq[w];
        dst[w] = denom > 0.0f ? dot[w] / std::sqrt(denom) : 0.0f;
      }
    }
  });
}

CostVolume cost_volume_cosine(const Tensor& left, const Tensor& right,
                              std::uint32_t max_disparity) {
  CostVolume cv;
  cost_volume_cosine_into(left, right, max_disparity, cv);
  return cv;
}

CostVolume cost_volume_lnd(const Tensor& left, const Tensor& right, std::uint32_t max_disparity,
                           const LayerNormParams& p) {
  check_pair(left, right, max_disparity);
  const Tensor left_norm = layer_norm_channel(left, p);
  const Tensor right_norm = layer_norm_channel(right, p);
  CostVolume cv;
  cv.kind = CostKind::lnd;
  head_dots(left_norm, right_norm, max_disparity, 1, 1.0f, cv.values);
  return cv;
}

void multi_head_from_normalized(const Tensor& left_norm, const Tensor& right_norm,
                                const CostVolumeConfig& cfg, Tensor& similarity,
                                CostVolume& out) {
  check_pair(left_norm, right_norm, cfg.max_disparity);
  cfg.validate(left_norm.dims());
  const std::uint32_t stride = left_norm.dims().c / cfg.head_num;
  const float scale = cfg.dot_scale ? 1.0f / std::sqrt(static_cast<float>(stride)) : 1.0f;
  head_dots(left_norm, right_norm, cfg.max_disparity, cfg.head_num, scale, similarity);
  out.kind = CostKind::multihead;
  group_pointwise_conv_into(similarity, cfg.pointwise, out.values);
}

void multi_head_cost_volume_into(const Tensor& left, const Tensor& right,
                                 const CostVolumeConfig& cfg,
                                 std::optional<EncodingInjection> rpe, MultiHeadWorkspace& ws,
                                 CostVolume& out) {
  check_pair(left, right, cfg.max_disparity);
  cfg.validate(left.dims());
  const std::uint32_t channels = left.dims().c;
  if (ws.norm.gamma.size() != channels || ws.norm.epsilon != cfg.epsilon) {
    ws.norm = LayerNormParams::identity(channels, cfg.epsilon);
  }
  layer_norm_channel_into(left, ws.norm, ws.left_norm);
  layer_norm_channel_into(right, ws.norm, ws.right_norm);
  if (rpe) {
    add_encoding(ws.left_norm, rpe->left, "left");
    add_encoding(ws.right_norm, rpe->right, "right");
  }
  multi_head_from_normalized(ws.left_norm, ws.right_norm, cfg, ws.similarity, out);
}

CostVolume multi_head_cost_volume(const Tensor& left, const Tensor& right,
                                  const CostVolumeConfig& cfg,
                                  std::optional<EncodingInjection> rpe) {
  MultiHeadWorkspace ws;
  CostVolume cv;
  multi_head_cost_volume_into(left, right, cfg, rpe, ws, cv);
  return cv;
}

Tensor argmax_disparity(const CostVolume& cv) {
  const Dims& d = cv.values.dims();
  Tensor out(Dims{d.n, 1, d.h, d.w});
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t h = 0; h < d.h; ++h)
      for (std::uint32_t w = 0; w < d.w; ++w) {
        std::uint32_t best = 0;
        float best_value = cv.values.at(n, 0, h, w);
        for (std::uint32_t i = 1; i < d.c; ++i) {
          const float v = cv.values.at(n, i, h, w);
          if (v > best_value) {
            best_value = v;
            best = i;
          }
        }
        out.at(n, 0, h, w) = static_cast<float>(best);
      }
  return out;
}

Tensor wrap_validity_mask(const Dims& input, std::uint32_t max_disparity) {
  require(max_disparity >= 1 && max_disparity < input.w, ErrorCode::invalid_argument,
          "max_disparity must be in [1, W)");
  Tensor mask(Dims{input.n, max_disparity, input.h, input.w});
  for (std::uint32_t n = 0; n < input.n; ++n)
    for (std::uint32_t i = 0; i < max_disparity; ++i)
      for (std::uint32_t h = 0; h < input.h; ++h) {
        auto row = mask.row(n, i, h);
        for (std::uint32_t w = i; w < input.w; ++w) row[w] = 1.0f;
      }
  return mask;
}

MacCount mac_count(CostKind kind, std::uint64_t channels, std::uint64_t height,
                   std::uint64_t width, std::uint64_t max_disparity, std::uint64_t heads) {
  require(channels >= 1 && height >= 1 && width >= 1 && max_disparity >= 1 && heads >= 1,
          ErrorCode::invalid_argument, "mac_count extents must be positive");
  const std::uint64_t chw = channels * height * width;
  MacCount m{0, kind, channels, height, width, max_disparity, heads};
  m.multiply_accumulates =
      kind == CostKind::cosine ? 3 * chw * max_disparity : 2 * 3 * chw + chw * max_disparity;
  return m;
}

std::string cost_volume_metadata(const CostVolume& cv, std::uint32_t heads, bool dot_scale) {
  std::ostringstream os;
  os << "kind=" << to_string(cv.kind) << '\n'
     << "d=" << cv.values.dims().c << '\n'
     << "heads=" << heads << '\n'
     << "dot_scale=" << (dot_scale ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace stereokit
