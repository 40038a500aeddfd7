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

#include "stereokit/tensor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "stereokit/error.hpp"
#include "stereokit/parallel.hpp"

namespace stereokit {

std::string to_string(const Dims& d) {
  return "[" + std::to_string(d.n) + "," + std::to_string(d.c) + "," + std::to_string(d.h) +
         "," + std::to_string(d.w) + "]";
}

void validate_dims(const Dims& d) {
  require(d.n >= 1 && d.c >= 1 && d.h >= 1 && d.w >= 1, ErrorCode::invalid_argument,
          "tensor extents must all be >= 1, got " + to_string(d));
}

Tensor::Tensor(Dims dims, float fill) : dims_(dims) {
  validate_dims(dims);
  require(std::isfinite(fill), ErrorCode::invalid_argument, "tensor fill value must be finite");
  data_.assign(dims.count(), fill);
}

Tensor::Tensor(Dims dims, std::vector<float> values) : dims_(dims), data_(std::move(values)) {
  validate_dims(dims);
  require(data_.size() == dims.count(), ErrorCode::shape_mismatch,
          "tensor data length " + std::to_string(data_.size()) + " does not match extents " +
              to_string(dims));
  require(all_finite(), ErrorCode::invalid_argument, "tensor values must be finite");
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

void Tensor::reshape(Dims dims) {
  validate_dims(dims);
  dims_ = dims;
  data_.resize(dims.count());
}

LayerNormParams LayerNormParams::identity(std::uint32_t channels, float epsilon) {
  return LayerNormParams{std::vector<float>(channels, 1.0f), std::vector<float>(channels, 0.0f),
                         epsilon};
}

void LayerNormParams::validate(std::uint32_t channels) const {
  require(epsilon > 0.0f && std::isfinite(epsilon), ErrorCode::invalid_argument,
          "layer norm epsilon must be positive");
  require(gamma.size() == channels && beta.size() == channels, ErrorCode::shape_mismatch,
          "layer norm gamma/beta length must equal channel extent " + std::to_string(channels));
}

void GroupConvWeights::validate() const {
  require(groups >= 1 && in_per_group >= 1 && out_per_group >= 1, ErrorCode::invalid_argument,
          "group conv counts must be >= 1");
  require(weights.size() == std::size_t{groups} * out_per_group * in_per_group,
          ErrorCode::shape_mismatch, "group conv weight length must equal G*Co*Cg");
  require(bias.empty() || bias.size() == std::size_t{groups} * out_per_group,
          ErrorCode::shape_mismatch, "group conv bias length must equal G*Co");
}

GroupConvWeights GroupConvWeights::uniform(std::uint32_t groups, std::uint32_t in_per_group,
                                           std::uint32_t out_per_group, float value) {
  GroupConvWeights w{groups, in_per_group, out_per_group, {}, {}};
  w.weights.assign(std::size_t{groups} * out_per_group * in_per_group, value);
  return w;
}

Tensor roll_horizontal(const Tensor& t, std::size_t offset) {
  const Dims& d = t.dims();
  const std::size_t shift = offset % d.w;
  Tensor out(d);
  const std::size_t rows = std::size_t{d.n} * d.c * d.h;
  auto src = t.data();
  auto dst = out.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const float* in = src.data() + r * d.w;
    float* o = dst.data() + r * d.w;
    std::copy(in, in + (d.w - shift), o + shift);
    std::copy(in + (d.w - shift), in + d.w, o);
  }
  return out;
}

void layer_norm_channel_into(const Tensor& t, const LayerNormParams& p, Tensor& out) {
  const Dims& d = t.dims();
  p.validate(d.c);
  out.reshape(d);
  const double inv_c = 1.0 / d.c;

  parallel_for(std::size_t{d.n} * d.h, 8, [&](std::size_t begin, std::size_t end) {
    std::vector<double> mean(d.w);
    std::vector<double> var(d.w);
    std::vector<float> scale(d.w);
    for (std::size_t row = begin; row < end; ++row) {
      const auto n = static_cast<std::uint32_t>(row / d.h);
      const auto h = static_cast<std::uint32_t>(row % d.h);
      std::fill(mean.begin(), mean.end(), 0.0);
      std::fill(var.begin(), var.end(), 0.0);
      for (std::uint32_t c = 0; c < d.c; ++c) {
        auto x = t.row(n, c, h);
        for (std::uint32_t w = 0; w < d.w; ++w) mean[w] += x[w];
      }
      for (std::uint32_t w = 0; w < d.w; ++w) mean[w] *= inv_c;
      for (std::uint32_t c = 0; c < d.c; ++c) {
        auto x = t.row(n, c, h);
        for (std::uint32_t w = 0; w < d.w; ++w) {
          const double centered = x[w] - mean[w];
          var[w] += centered * centered;
        }
      }
      for (std::uint32_t w = 0; w < d.w; ++w) {
        scale[w] = static_cast<float>(1.0 / std::sqrt(var[w] * inv_c + p.epsilon));
      }
      for (std::uint32_t c = 0; c < d.c; ++c) {
        auto x = t.row(n, c, h);
        auto y = out.row(n, c, h);
        const float g = p.gamma[c];
        const float b = p.beta[c];
        for (std::uint32_t w = 0; w < d.w; ++w) {
          y[w] = (x[w] - static_cast<float>(mean[w])) * scale[w] * g + b;
        }
      }
    }
  });
}

Tensor layer_norm_channel(const Tensor& t, const LayerNormParams& p) {
  Tensor out(t.dims());
  layer_norm_channel_into(t, p, out);
  return out;
}

void group_pointwise_conv_into(const Tensor& t, const GroupConvWeights& wt, Tensor& out) {
  wt.validate();
  const Dims& d = t.dims();
  require(d.c == wt.groups * wt.in_per_group, ErrorCode::shape_mismatch,
          "group conv expects " + std::to_string(wt.groups * wt.in_per_group) +
              " input channels, tensor has " + std::to_string(d.c));
  const std::uint32_t out_c = wt.groups * wt.out_per_group;
  out.reshape(Dims{d.n, out_c, d.h, d.w});
  const std::size_t plane = d.plane();
  const bool has_bias = !wt.bias.empty();

  parallel_for(std::size_t{d.n} * out_c, 4, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const auto n = static_cast<std::uint32_t>(idx / out_c);
      const auto oc = static_cast<std::uint32_t>(idx % out_c);
      const std::uint32_t g = oc / wt.out_per_group;
      const std::uint32_t o = oc % wt.out_per_group;
      float* dst = out.data().data() + out.offset(n, oc, 0, 0);
      std::fill(dst, dst + plane, 0.0f);
      for (std::uint32_t j = 0; j < wt.in_per_group; ++j) {
        const float k = wt.weight(g, o, j);
        const float* src = t.data().data() + t.offset(n, g * wt.in_per_group + j, 0, 0);
        for (std::size_t p = 0; p < plane; ++p) dst[p] += k * src[p];
      }
      if (has_bias) {
        const float b = wt.bias[std::size_t{g} * wt.out_per_group + o];
        for (std::size_t p = 0; p < plane; ++p) dst[p] += b;
      }
    }
  });
}

Tensor group_pointwise_conv(const Tensor& t, const GroupConvWeights& w) {
  Tensor out;
  group_pointwise_conv_into(t, w, out);
  return out;
}

Tensor subsample2(const Tensor& t) {
  const Dims& d = t.dims();
  require(d.h >= 2 && d.w >= 2, ErrorCode::invalid_argument,
          "subsample2 needs H >= 2 and W >= 2, got " + to_string(d));
  Tensor out(Dims{d.n, d.c, d.h / 2, d.w / 2});
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t c = 0; c < d.c; ++c)
      for (std::uint32_t h = 0; h < d.h / 2; ++h) {
        auto top = t.row(n, c, 2 * h);
        auto bottom = t.row(n, c, 2 * h + 1);
        auto dst = out.row(n, c, h);
        for (std::uint32_t w = 0; w < d.w / 2; ++w) {
          dst[w] = 0.25f * ((top[2 * w] + top[2 * w + 1]) + (bottom[2 * w] + bottom[2 * w + 1]));
        }
      }
  return out;
}

std::pair<Tensor, Tensor> spatial_gradient(const Tensor& t) {
  const Dims& d = t.dims();
  require(d.h >= 2 && d.w >= 2, ErrorCode::invalid_argument,
          "spatial_gradient needs H >= 2 and W >= 2, got " + to_string(d));
  Tensor gx(d);
  Tensor gy(d);
  for (std::uint32_t n = 0; n < d.n; ++n)
    for (std::uint32_t c = 0; c < d.c; ++c)
      for (std::uint32_t h = 0; h < d.h; ++h) {
        auto src = t.row(n, c, h);
        auto dx = gx.row(n, c, h);
        for (std::uint32_t w = 0; w + 1 < d.w; ++w) dx[w] = src[w + 1] - src[w];
        if (h + 1 < d.h) {
          auto below = t.row(n, c, h + 1);
          auto dy = gy.row(n, c, h);
          for (std::uint32_t w = 0; w < d.w; ++w) dy[w] = below[w] - src[w];
        }
      }
  return {std::move(gx), std::move(gy)};
}

namespace {

constexpr std::array<char, 4> kMagic{'S', 'T', 'E', 'N'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  require(is.gcount() == 4, ErrorCode::io, "STEN stream truncated");
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

}  // namespace

void write_sten(std::ostream& os, const Tensor& t) {
  os.write(kMagic.data(), kMagic.size());
  os.put(static_cast<char>(kVersion));
  const Dims& d = t.dims();
  put_u32(os, d.n);
  put_u32(os, d.c);
  put_u32(os, d.h);
  put_u32(os, d.w);
  for (float v : t.data()) put_u32(os, std::bit_cast<std::uint32_t>(v));
  require(static_cast<bool>(os), ErrorCode::io, "failed writing STEN stream");
}

Tensor read_sten(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  require(is.gcount() == 4 && magic == kMagic, ErrorCode::io, "not a STEN stream (bad magic)");
  const int version = is.get();
  require(version == kVersion, ErrorCode::io,
          "unsupported STEN version " + std::to_string(version));
  Dims d;
  d.n = get_u32(is);
  d.c = get_u32(is);
  d.h = get_u32(is);
  d.w = get_u32(is);
  validate_dims(d);
  std::vector<float> values(d.count());
  for (float& v : values) v = std::bit_cast<float>(get_u32(is));
  return Tensor(d, std::move(values));
}

void save_sten(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::io, "cannot open " + path.string() + " for writing");
  write_sten(os, t);
}

Tensor load_sten(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::io, "cannot open " + path.string());
  return read_sten(is);
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::domain: return "domain";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace stereokit
