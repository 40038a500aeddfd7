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

#include "stereokit/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stereokit/error.hpp"

namespace stereokit {

void EncodingParams::validate() const {
  require(channels >= 4 && channels % 4 == 0, ErrorCode::invalid_argument,
          "encoding channels must be a positive multiple of 4, got " + std::to_string(channels));
  require(frequency > 0.0 && std::isfinite(frequency), ErrorCode::invalid_argument,
          "encoding frequency must be positive");
}

void EncodingParams::validate_for(std::uint32_t width, std::uint32_t height) const {
  validate();
  require(2.0 * std::numbers::pi * frequency > std::max(width, height),
          ErrorCode::invalid_argument,
          "encoding frequency too low for a " + std::to_string(width) + "x" +
              std::to_string(height) + " map (need 2*pi*f > max extent)");
}

namespace {

inline double channel_value(std::uint32_t i, double x, double y, const EncodingParams& p,
                            double base) {
  switch (i % 4) {
    case 0: return std::sin(x / std::pow(p.frequency, i / base));
    case 1: return std::cos(x / std::pow(p.frequency, (i - 1) / base));
    case 2: return std::sin(y / std::pow(p.frequency, i / base));
    default: return std::cos(y / std::pow(p.frequency, (i - 1) / base));
  }
}

void encode_into(double x, double y, const EncodingParams& p, float* out, std::size_t stride) {
  const double base = p.effective_exponent_base();
  for (std::uint32_t i = 0; i < p.channels; ++i) {
    out[i * stride] = static_cast<float>(channel_value(i, x, y, p, base));
  }
}

Pixel rpe_source(const Homography& h, const Homography& h_inv, double x, double y,
                 RpeSampling sampling) {
  return apply_homography(sampling == RpeSampling::inverse ? h_inv : h, Pixel{x, y});
}

}  // namespace

std::vector<double> positional_encoding(double x, double y, const EncodingParams& p) {
  p.validate();
  const double base = p.effective_exponent_base();
  std::vector<double> out(p.channels);
  for (std::uint32_t i = 0; i < p.channels; ++i) out[i] = channel_value(i, x, y, p, base);
  return out;
}

std::vector<double> rpe_encoding_at(const Homography& h, double x, double y,
                                    const EncodingParams& p, RpeSampling sampling) {
  const Pixel src = rpe_source(h, h.inverse(), x, y, sampling);
  return positional_encoding(src.x, src.y, p);
}

EncodingMap pe_map(std::uint32_t width, std::uint32_t height, const EncodingParams& p) {
  p.validate_for(width, height);
  EncodingMap m{Tensor(Dims{1, p.channels, height, width}), EncodingRange::raw};
  const std::size_t plane = std::size_t{width} * height;
  float* base = m.values.data().data();
  for (std::uint32_t y = 0; y < height; ++y)
    for (std::uint32_t x = 0; x < width; ++x) {
      encode_into(x, y, p, base + std::size_t{y} * width + x, plane);
    }
  return m;
}

std::pair<EncodingMap, EncodingMap> rpe_map(const Homography& h, std::uint32_t width,
                                            std::uint32_t height, const EncodingParams& p,
                                            RpeSampling sampling) {
  EncodingMap left = pe_map(width, height, p);
  EncodingMap right{Tensor(Dims{1, p.channels, height, width}), EncodingRange::raw};
  const Homography h_inv = h.inverse();
  const std::size_t plane = std::size_t{width} * height;
  float* base = right.values.data().data();
  for (std::uint32_t y = 0; y < height; ++y)
    for (std::uint32_t x = 0; x < width; ++x) {
      const Pixel src = rpe_source(h, h_inv, x, y, sampling);
      encode_into(src.x, src.y, p, base + std::size_t{y} * width + x, plane);
    }
  return {std::move(left), std::move(right)};
}

EncodingMap rescale_encoding(const EncodingMap& m) {
  require(m.range == EncodingRange::raw, ErrorCode::invalid_argument,
          "encoding map is already rescaled to [0, 1]");
  EncodingMap out{m.values, EncodingRange::rescaled};
  for (float& v : out.values.data()) v = std::clamp((v + 1.0f) * 0.5f, 0.0f, 1.0f);
  return out;
}

double encoding_match_score(const EncodingMap& left, const EncodingMap& right,
                            const Homography& true_map, const MatchScoreOptions& opts) {
  const Dims& d = left.values.dims();
  require(d == right.values.dims(), ErrorCode::shape_mismatch,
          "encoding maps must share extents");
  require(left.range == right.range, ErrorCode::invalid_argument,
          "encoding maps must both be raw or both be rescaled");
  require(opts.stride >= 1, ErrorCode::invalid_argument, "sample stride must be >= 1");
  const std::size_t plane = d.plane();
  const float* lv = left.values.data().data();
  const float* rv = right.values.data().data();

  std::size_t samples = 0;
  std::size_t hits = 0;
  for (std::uint32_t qy = 0; qy < d.h; qy += opts.stride)
    for (std::uint32_t qx = 0; qx < d.w; qx += opts.stride) {
      Pixel truth;
      try {
        truth = apply_homography(true_map, Pixel{double(qx), double(qy)});
      } catch (const Error&) {
        continue;
      }
      if (!(truth.x >= 0.0 && truth.y >= 0.0 && truth.x <= d.w - 1.0 && truth.y <= d.h - 1.0))
        continue;
      ++samples;
      const std::uint32_t x0 = qx > opts.window_radius ? qx - opts.window_radius : 0;
      const std::uint32_t y0 = qy > opts.window_radius ? qy - opts.window_radius : 0;
      const std::uint32_t x1 = std::min(d.w - 1, qx + opts.window_radius);
      const std::uint32_t y1 = std::min(d.h - 1, qy + opts.window_radius);
      const std::size_t q_idx = std::size_t{qy} * d.w + qx;
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t bx = x0;
      std::uint32_t by = y0;
      // x-major scan with strict improvement gives the smaller-x-then-y tie rule.
      for (std::uint32_t x = x0; x <= x1; ++x)
        for (std::uint32_t y = y0; y <= y1; ++y) {
          const std::size_t r_idx = std::size_t{y} * d.w + x;
          double dist = 0.0;
          for (std::uint32_t c = 0; c < d.c; ++c) {
            const double diff = double(lv[c * plane + q_idx]) - double(rv[c * plane + r_idx]);
            dist += diff * diff;
          }
          if (dist < best) {
            best = dist;
            bx = x;
            by = y;
          }
        }
      if (std::hypot(bx - truth.x, by - truth.y) <= 1.0) ++hits;
    }
  require(samples > 0, ErrorCode::invalid_argument,
          "no sampled pixel has its true correspondence inside the image");
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace stereokit
