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
#include <utility>
#include <vector>

#include "stereokit/geometry.hpp"
#include "stereokit/tensor.hpp"

namespace stereokit {

struct EncodingParams {
  std::uint32_t channels = 8;
  double frequency = 200.0;
  /// Denominator of the channel exponent; 0 selects `channels`.
  std::uint32_t exponent_base = 0;

  std::uint32_t effective_exponent_base() const noexcept {
    return exponent_base == 0 ? channels : exponent_base;
  }
  void validate() const;
  /// Also checks 2*pi*f > max(width, height).
  void validate_for(std::uint32_t width, std::uint32_t height) const;
};

enum class EncodingRange { raw, rescaled };

/// [1, C, H, W] encoding values tagged with their range: raw in [-1, 1],
/// rescaled in [0, 1].
struct EncodingMap {
  Tensor values;
  EncodingRange range = EncodingRange::raw;
};

/// How the right map is sampled on the integer right-pixel grid.
enum class RpeSampling {
  /// right(r) = PE(H^-1 r): the right pixel carries the code of the left
  /// position that lands on it, so corresponding points share codes.
  inverse,
  /// right(r) = PE(H r): the formula evaluated literally on the grid.
  forward,
};

/// Channel i is sin/cos of x or y at frequency f^-(i - i mod 2)/d:
/// i%4 == 0 sin x, 1 cos x, 2 sin y, 3 cos y.
std::vector<double> positional_encoding(double x, double y, const EncodingParams& p);

/// Right-map code for right pixel (x, y) under `sampling`.
std::vector<double> rpe_encoding_at(const Homography& h, double x, double y,
                                    const EncodingParams& p, RpeSampling sampling);

/// Plain encoding of every integer pixel.
EncodingMap pe_map(std::uint32_t width, std::uint32_t height, const EncodingParams& p);

/// Left map = PE on the pixel grid; right map = rectification encoding
/// through `h` (left-to-right). Both raw.
std::pair<EncodingMap, EncodingMap> rpe_map(const Homography& h, std::uint32_t width,
                                            std::uint32_t height, const EncodingParams& p,
                                            RpeSampling sampling = RpeSampling::inverse);

/// v -> (v + 1) / 2. Throws when the map is already rescaled.
EncodingMap rescale_encoding(const EncodingMap& m);

struct MatchScoreOptions {
  std::uint32_t stride = 4;         // left sample grid spacing
  std::uint32_t window_radius = 16; // search half-width around the left position
};

/// Fraction of sampled left pixels whose nearest right code (Euclidean, within
/// the search window, ties toward smaller x then y) lies within 1 px of the
/// true correspondence `true_map(q)`. Samples whose correspondence leaves the
/// image are skipped.
double encoding_match_score(const EncodingMap& left, const EncodingMap& right,
                            const Homography& true_map, const MatchScoreOptions& opts = {});

}  // namespace stereokit
