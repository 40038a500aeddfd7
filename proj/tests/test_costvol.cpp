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

#include <cmath>

#include "doctest.h"
#include "stereokit/costvol.hpp"
#include "stereokit/encoding.hpp"
#include "stereokit/error.hpp"
#include "stereokit/reference.hpp"
#include "test_support.hpp"

using namespace stereokit;
using stereokit::testing::random_tensor;

namespace {

std::uint32_t pick(Sampler& rng, std::uint32_t lo, std::uint32_t hi) {
  return lo + static_cast<std::uint32_t>(rng.bits() % (hi - lo + 1));
}

}  // namespace

TEST_CASE("cosine self-similarity at offset zero is one") {
  Sampler rng(1);
  const Tensor t = random_tensor(Dims{1, 3, 4, 6}, rng, 0.1f, 1.0f);
  const CostVolume cv = cost_volume_cosine(t, t, 3);
  CHECK(cv.values.dims() == Dims{1, 3, 4, 6});
  for (std::uint32_t h = 0; h < 4; ++h) {
    for (std::uint32_t w = 0; w < 6; ++w) {
      CHECK(cv.values.at(0, 0, h, w) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("cosine of orthogonal and zero vectors") {
  const Tensor l(Dims{1, 2, 1, 2}, {1, 1, 0, 0});
  const Tensor r(Dims{1, 2, 1, 2}, {0, 0, 1, 1});
  CHECK(cost_volume_cosine(l, r, 1).values.at(0, 0, 0, 0) == 0.0f);
  const Tensor z(Dims{1, 2, 1, 2});
  const CostVolume cz = cost_volume_cosine(l, z, 1);
  for (float v : cz.values.data()) CHECK(v == 0.0f);
}

TEST_CASE("cosine matches the scalar oracle and stays in [-1, 1]") {
  Sampler rng(2);
  const Tensor l = random_tensor(Dims{1, 3, 1, 4}, rng);
  const Tensor r = random_tensor(Dims{1, 3, 1, 4}, rng);
  const auto cv = cost_volume_cosine(l, r, 2);
  CHECK(reference::max_abs_diff(cv.values.data(), reference::cosine_cost_volume(l, r, 2)) <=
        1e-6);

  for (int trial = 0; trial < 30; ++trial) {
    const Dims d{pick(rng, 1, 2), pick(rng, 1, 16), pick(rng, 1, 8), pick(rng, 3, 20)};
    const Tensor a = random_tensor(d, rng, -4.0f, 4.0f);
    const Tensor b = random_tensor(d, rng, -4.0f, 4.0f);
    const std::uint32_t md = pick(rng, 1, d.w - 1);
    const auto c = cost_volume_cosine(a, b, md);
    CHECK(reference::max_abs_diff(c.values.data(), reference::cosine_cost_volume(a, b, md)) <=
          1e-6);
    for (float v : c.values.data()) {
      REQUIRE(v >= -1.0f - 1e-6f);
      REQUIRE(v <= 1.0f + 1e-6f);
    }
  }
}

TEST_CASE("cost volumes reject mismatched shapes and out of range disparity") {
  const Tensor a(Dims{1, 4, 2, 8}, 1.0f), b(Dims{1, 4, 2, 7}, 1.0f);
  CHECK_THROWS_AS(cost_volume_cosine(a, b, 2), Error);
  CHECK_THROWS_AS(cost_volume_cosine(a, a, 8), Error);
  CHECK_THROWS_AS(cost_volume_lnd(a, b, 2, LayerNormParams::identity(4)), Error);
  CHECK_THROWS_AS(multi_head_cost_volume(a, a, CostVolumeConfig::make(2, 3)), Error);
  CHECK_THROWS_AS(multi_head_cost_volume(a, a, CostVolumeConfig::make(8, 2)), Error);
  CHECK_THROWS_AS(multi_head_cost_volume(a, a, CostVolumeConfig::make(0, 2)), Error);
}

TEST_CASE("LND self-similarity at offset zero is close to C") {
  Sampler rng(3);
  const std::uint32_t c = 16;
  const Tensor t = random_tensor(Dims{1, c, 3, 5}, rng);
  const auto cv = cost_volume_lnd(t, t, 2, LayerNormParams::identity(c));
  for (std::uint32_t h = 0; h < 3; ++h) {
    for (std::uint32_t w = 0; w < 5; ++w) {
      if (reference::channel_variance(reference::pixel_vector(t, 0, h, w)) < 1e-3) continue;
      CHECK(std::abs(cv.values.at(0, 0, h, w) - c) <= 1e-2 * c);
    }
  }
}

TEST_CASE("LND and multi-head volumes of constant-channel inputs are zero") {
  Tensor t(Dims{1, 8, 2, 6});
  for (std::uint32_t h = 0; h < 2; ++h) {
    for (std::uint32_t w = 0; w < 6; ++w) {
      for (std::uint32_t c = 0; c < 8; ++c) t.at(0, c, h, w) = static_cast<float>(h + w);
    }
  }
  const CostVolume lnd = cost_volume_lnd(t, t, 3, LayerNormParams::identity(8));
  for (float v : lnd.values.data()) CHECK(v == 0.0f);
  for (std::uint32_t heads : {1u, 2u, 4u, 8u}) {
    const CostVolume mh = multi_head_cost_volume(t, t, CostVolumeConfig::make(3, heads));
    for (float v : mh.values.data()) CHECK(v == 0.0f);
  }
}

TEST_CASE("LND divided by C approximates the centred cosine") {
  Sampler rng(4);
  const std::uint32_t c = 12;
  const Tensor l = random_tensor(Dims{1, c, 4, 9}, rng);
  const Tensor r = random_tensor(Dims{1, c, 4, 9}, rng);
  const std::uint32_t md = 4;
  const auto cv = cost_volume_lnd(l, r, md, LayerNormParams::identity(c, 1e-8f));
  for (std::uint32_t i = 0; i < md; ++i) {
    for (std::uint32_t h = 0; h < 4; ++h) {
      for (std::uint32_t w = 0; w < 9; ++w) {
        const auto a = reference::pixel_vector(l, 0, h, w);
        const auto b = reference::pixel_vector(r, 0, h, (w + 9 - i) % 9);
        if (reference::channel_variance(a) < 1e-3 || reference::channel_variance(b) < 1e-3) {
          continue;
        }
        CHECK(std::abs(cv.values.at(0, i, h, w) / c - reference::centered_cosine(a, b)) <= 1e-4);
      }
    }
  }
}

TEST_CASE("single head multi-head volume without dot scale equals LND") {
  Sampler rng(5);
  const Tensor l = random_tensor(Dims{2, 8, 3, 7}, rng);
  const Tensor r = random_tensor(Dims{2, 8, 3, 7}, rng);
  const auto cfg = CostVolumeConfig::make(4, 1, false);
  const auto mh = multi_head_cost_volume(l, r, cfg);
  const auto lnd = cost_volume_lnd(l, r, 4, LayerNormParams::identity(8));
  CHECK(reference::max_abs_diff(mh.values.data(), lnd.values.data()) <= 1e-5);
}

TEST_CASE("multi-head output shape") {
  Sampler rng(6);
  const Tensor l = random_tensor(Dims{2, 8, 3, 5}, rng);
  const auto cv = multi_head_cost_volume(l, l, CostVolumeConfig::make(4, 2));
  CHECK(cv.values.dims() == Dims{2, 4, 3, 5});
  CHECK(cv.kind == CostKind::multihead);
}

TEST_CASE("multi-head volume equals the literal loop transcription") {
  Sampler rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t heads = pick(rng, 1, 4);
    const std::uint32_t c = heads * pick(rng, 1, 32 / heads);
    const Dims d{pick(rng, 1, 2), c, pick(rng, 1, 16), pick(rng, 2, 16)};
    const std::uint32_t md = pick(rng, 1, std::min(8u, d.w - 1));
    auto cfg = CostVolumeConfig::make(md, heads, rng.uniform() < 0.5);
    for (float& w : cfg.pointwise.weights) w = static_cast<float>(rng.uniform(-1, 1));
    cfg.pointwise.bias.assign(md, 0.0f);
    for (float& b : cfg.pointwise.bias) b = static_cast<float>(rng.uniform(-1, 1));
    const Tensor l = random_tensor(d, rng);
    const Tensor r = random_tensor(d, rng);
    const auto cv = multi_head_cost_volume(l, r, cfg);
    CHECK(reference::max_abs_diff(cv.values.data(), reference::multi_head_loops(l, r, cfg)) <=
          1e-5);
  }
}

TEST_CASE("encoding injection is addition before the disparity loop") {
  Sampler rng(8);
  const Dims d{1, 8, 6, 12};
  const Tensor l = random_tensor(d, rng);
  const Tensor r = random_tensor(d, rng);
  const auto [le, re] = rpe_map(Homography::identity(), d.w, d.h, EncodingParams{8, 200.0, 0});
  const EncodingMap ls = rescale_encoding(le), rs = rescale_encoding(re);
  const auto cfg = CostVolumeConfig::make(5, 2);
  const auto with = multi_head_cost_volume(l, r, cfg, EncodingInjection{ls.values, rs.values});
  CHECK(reference::max_abs_diff(with.values.data(),
                                reference::multi_head_loops(l, r, cfg, &ls.values, &rs.values)) <=
        1e-5);

  // Same result by normalising first, adding the code, then running the
  // disparity loop directly.
  Tensor ln = layer_norm_channel(l, LayerNormParams::identity(8, cfg.epsilon));
  Tensor rn = layer_norm_channel(r, LayerNormParams::identity(8, cfg.epsilon));
  for (std::size_t k = 0; k < ln.size(); ++k) {
    ln.data()[k] += ls.values.data()[k];
    rn.data()[k] += rs.values.data()[k];
  }
  Tensor sim;
  CostVolume manual;
  multi_head_from_normalized(ln, rn, cfg, sim, manual);
  CHECK(reference::max_abs_diff(with.values.data(), manual.values.data()) <= 1e-6);

  const Tensor wrong(Dims{1, 8, 6, 11});
  CHECK_THROWS_AS(multi_head_cost_volume(l, r, cfg, EncodingInjection{wrong, wrong}), Error);
}

TEST_CASE("argmax readout") {
  Tensor inc(Dims{1, 4, 2, 2});
  for (std::uint32_t i = 0; i < 4; ++i) {
    for (std::uint32_t h = 0; h < 2; ++h) {
      for (std::uint32_t w = 0; w < 2; ++w) inc.at(0, i, h, w) = static_cast<float>(i);
    }
  }
  const Tensor top = argmax_disparity(CostVolume{inc, CostKind::lnd});
  for (float v : top.data()) CHECK(v == 3.0f);
  const Tensor tie = argmax_disparity(CostVolume{Tensor(Dims{1, 4, 2, 2}, 0.5f)});
  for (float v : tie.data()) CHECK(v == 0.0f);
  Sampler rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor cv = random_tensor(Dims{1, 4, 2, 2}, rng);
    CHECK(argmax_disparity(CostVolume{cv}) == reference::argmax_loops(cv));
  }
}

TEST_CASE("MAC counts follow the closed forms") {
  CHECK(mac_count(CostKind::cosine, 64, 4, 4, 8, 1).multiply_accumulates == 24576);
  CHECK(mac_count(CostKind::multihead, 64, 4, 4, 8, 4).multiply_accumulates == 14336);
  for (std::uint64_t d = 1; d <= 12; ++d) {
    const auto mh = mac_count(CostKind::multihead, 7, 3, 5, d, 1).multiply_accumulates;
    const auto cos = mac_count(CostKind::cosine, 7, 3, 5, d, 1).multiply_accumulates;
    CHECK((mh < cos) == (d > 3));
  }
}

TEST_CASE("instrumented oracles tally the closed-form MAC counts") {
  Sampler rng(10);
  for (std::uint32_t c : {1u, 4u}) {
    for (std::uint32_t d : {2u, 3u, 4u, 6u}) {
      const Dims dims{1, c, 2, 9};
      const Tensor l = random_tensor(dims, rng), r = random_tensor(dims, rng);
      reference::MacCounter cos_counter, mh_counter;
      reference::cosine_cost_volume(l, r, d, &cos_counter);
      reference::multi_head_loops(l, r, CostVolumeConfig::make(d, 1), nullptr, nullptr,
                                  &mh_counter);
      CHECK(cos_counter.cost_volume() ==
            mac_count(CostKind::cosine, c, 2, 9, d, 1).multiply_accumulates);
      CHECK(mh_counter.cost_volume() ==
            mac_count(CostKind::multihead, c, 2, 9, d, 1).multiply_accumulates);
      CHECK(mh_counter.fusion == std::uint64_t{2} * 9 * d);
    }
  }
}

TEST_CASE("wrap validity mask and metadata") {
  const Tensor m = wrap_validity_mask(Dims{1, 3, 1, 5}, 3);
  CHECK(m.dims() == Dims{1, 3, 1, 5});
  CHECK(m.at(0, 0, 0, 0) == 1.0f);
  CHECK(m.at(0, 2, 0, 1) == 0.0f);
  CHECK(m.at(0, 2, 0, 2) == 1.0f);

  const CostVolume cv{Tensor(Dims{1, 4, 1, 6}), CostKind::multihead};
  const std::string meta = cost_volume_metadata(cv, 2, true);
  CHECK(meta.find("kind=multihead") != std::string::npos);
  CHECK(meta.find("d=4") != std::string::npos);
  CHECK(meta.find("heads=2") != std::string::npos);
  CHECK(meta.find("dot_scale=") != std::string::npos);
  CHECK(parse_cost_kind("lnd") == CostKind::lnd);
  CHECK_THROWS_AS(parse_cost_kind("sad"), Error);
}
