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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stereokit {

/// Extents of a rank-4 tensor in N, C, H, W order.
struct Dims {
  std::uint32_t n = 1;
  std::uint32_t c = 1;
  std::uint32_t h = 1;
  std::uint32_t w = 1;

  std::size_t count() const noexcept {
    return std::size_t{n} * c * h * w;
  }
  std::size_t plane() const noexcept { return std::size_t{h} * w; }

  friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& dims);

/// Dense NCHW float tensor. Every extent is at least 1 and every value is
/// finite; constructors that accept external data verify both.
class Tensor {
 public:
  Tensor() : Tensor(Dims{}) {}
  explicit Tensor(Dims dims, float fill = 0.0f);
  Tensor(Dims dims, std::vector<float> values);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  std::size_t offset(std::uint32_t n, std::uint32_t c, std::uint32_t h,
                     std::uint32_t w) const noexcept {
    return ((std::size_t{n} * dims_.c + c) * dims_.h + h) * dims_.w + w;
  }
  float& at(std::uint32_t n, std::uint32_t c, std::uint32_t h, std::uint32_t w) noexcept {
    return data_[offset(n, c, h, w)];
  }
  float at(std::uint32_t n, std::uint32_t c, std::uint32_t h, std::uint32_t w) const noexcept {
    return data_[offset(n, c, h, w)];
  }

  /// Contiguous W-length row at (n, c, h).
  std::span<float> row(std::uint32_t n, std::uint32_t c, std::uint32_t h) noexcept {
    return std::span<float>(data_).subspan(offset(n, c, h, 0), dims_.w);
  }
  std::span<const float> row(std::uint32_t n, std::uint32_t c, std::uint32_t h) const noexcept {
    return std::span<const float>(data_).subspan(offset(n, c, h, 0), dims_.w);
  }

  bool all_finite() const noexcept;

  /// Reallocates only when the element count changes.
  void reshape(Dims dims);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Dims dims_;
  std::vector<float> data_;
};

/// Throws unless every extent is >= 1.
void validate_dims(const Dims& dims);

struct LayerNormParams {
  std::vector<float> gamma;
  std::vector<float> beta;
  float epsilon = 1e-5f;

  /// gamma = 1, beta = 0.
  static LayerNormParams identity(std::uint32_t channels, float epsilon = 1e-5f);
  void validate(std::uint32_t channels) const;
};

struct GroupConvWeights {
  std::uint32_t groups = 1;
  std::uint32_t in_per_group = 1;
  std::uint32_t out_per_group = 1;
  /// [g][o][j] with j fastest.
  std::vector<float> weights;
  /// [g][o]; empty means no bias.
  std::vector<float> bias;

  float weight(std::uint32_t g, std::uint32_t o, std::uint32_t j) const noexcept {
    return weights[(std::size_t{g} * out_per_group + o) * in_per_group + j];
  }
  void validate() const;
  /// Every weight set to `value`, no bias.
  static GroupConvWeights uniform(std::uint32_t groups, std::uint32_t in_per_group,
                                  std::uint32_t out_per_group, float value);
};

// Operators. Each has an allocating form and an `_into` form writing a
// caller-owned output, which benchmarks use to keep allocation out of the
// timed region.

/// out[.., w] = in[.., (w - offset) mod W].
Tensor roll_horizontal(const Tensor& t, std::size_t offset);

/// Per-pixel normalisation across channels with population variance.
Tensor layer_norm_channel(const Tensor& t, const LayerNormParams& p);
void layer_norm_channel_into(const Tensor& t, const LayerNormParams& p, Tensor& out);

Tensor group_pointwise_conv(const Tensor& t, const GroupConvWeights& w);
void group_pointwise_conv_into(const Tensor& t, const GroupConvWeights& w, Tensor& out);

/// 2x2 mean pooling; odd trailing rows/columns are dropped.
Tensor subsample2(const Tensor& t);

/// Forward differences (gx, gy); trailing column/row is zero.
std::pair<Tensor, Tensor> spatial_gradient(const Tensor& t);

// STEN v1 binary format: "STEN", u8 version = 1, u32le N C H W, f32le data.

void write_sten(std::ostream& os, const Tensor& t);
Tensor read_sten(std::istream& is);
void save_sten(const std::filesystem::path& path, const Tensor& t);
Tensor load_sten(const std::filesystem::path& path);

}  // namespace stereokit
