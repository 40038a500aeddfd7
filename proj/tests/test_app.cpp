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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "stereokit/app.hpp"
#include "stereokit/error.hpp"
#include "stereokit/image_io.hpp"
#include "test_support.hpp"

using namespace stereokit;
using nlohmann::json;
using stereokit::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Tensor quantised(Tensor t) {
  for (float& v : t.data()) v = std::round(v * 255.0f) / 255.0f;
  return t;
}

}  // namespace

TEST_CASE("png round trip and min-max rescale") {
  TempDir dir("png");
  Sampler rng(1);
  const Tensor img = quantised(stereokit::testing::random_tensor(Dims{1, 3, 9, 13}, rng, 0, 1));
  save_png(dir.path() / "a.png", img);
  CHECK(load_png(dir.path() / "a.png") == img);
  CHECK_THROWS_AS(load_png(dir.path() / "missing.png"), Error);

  Tensor ramp(Dims{1, 1, 1, 3}, {-2.0f, 0.0f, 2.0f});
  const Tensor r = minmax_rescale(ramp);
  CHECK(r.at(0, 0, 0, 0) == 0.0f);
  CHECK(r.at(0, 0, 0, 1) == 0.5f);
  CHECK(r.at(0, 0, 0, 2) == 1.0f);
}

TEST_CASE("simmap of identical images at offset 0 is uniformly one for cosine") {
  TempDir dir("simmap_same");
  Sampler rng(2);
  const Tensor img =
      quantised(stereokit::testing::random_tensor(Dims{1, 3, 16, 24}, rng, 0.05f, 1.0f));
  save_png(dir.path() / "l.png", img);
  const CommandOutput out =
      run_simmap(dir.path() / "l.png", dir.path() / "l.png", 0, dir.path() / "out");
  const json j = json::parse(out.report_json);
  CHECK(j["maps"]["cosine"]["min"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(j["maps"]["cosine"]["max"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(j["heads"] == 3);
  CHECK(out.written.size() == 4);
  for (const auto& p : out.written) CHECK(std::filesystem::exists(p));
}

TEST_CASE("simmap keeps the roll strip in every map") {
  TempDir dir("simmap_strip");
  Sampler rng(3);
  const std::uint32_t w = 48, shift = 10;
  const Tensor left = quantised(stereokit::testing::random_tensor(Dims{1, 3, 16, w}, rng, 0, 1));
  Tensor right = quantised(stereokit::testing::random_tensor(Dims{1, 3, 16, w}, rng, 0, 1));
  for (std::uint32_t c = 0; c < 3; ++c) {
    for (std::uint32_t y = 0; y < 16; ++y) {
      for (std::uint32_t x = 0; x + shift < w; ++x) right.at(0, c, y, x) = left.at(0, c, y, x + shift);
    }
  }
  save_png(dir.path() / "l.png", left);
  save_png(dir.path() / "r.png", right);
  run_simmap(dir.path() / "l.png", dir.path() / "r.png", shift, dir.path() / "out");
  for (const char* name : {"cosine.png", "lnd.png", "multihead.png"}) {
    const Tensor map = load_png(dir.path() / "out" / name);
    double strip = 0.0, rest = 0.0;
    for (std::uint32_t y = 0; y < 16; ++y) {
      for (std::uint32_t x = 0; x < w; ++x) (x < shift ? strip : rest) += map.at(0, 0, y, x);
    }
    strip /= 16.0 * shift;
    rest /= 16.0 * (w - shift);
    INFO(name);
    CHECK(rest - strip > 0.2);
  }
}

TEST_CASE("simmap errors leave no artifacts") {
  TempDir dir("simmap_err");
  const auto out = dir.path() / "out";
  try {
    run_simmap(dir.path() / "nope.png", dir.path() / "nope.png", 1, out);
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
  CHECK_FALSE(std::filesystem::exists(out));

  save_png(dir.path() / "a.png", Tensor(Dims{1, 3, 8, 8}, 0.5f));
  save_png(dir.path() / "b.png", Tensor(Dims{1, 3, 8, 9}, 0.5f));
  CHECK_THROWS_AS(run_simmap(dir.path() / "a.png", dir.path() / "b.png", 1, out), Error);
  CHECK_THROWS_AS(run_simmap(dir.path() / "a.png", dir.path() / "a.png", 7, out), Error);
  CHECK_FALSE(std::filesystem::exists(out));
}

TEST_CASE("demo is deterministic and writes its artifacts") {
  TempDir dir("demo");
  DemoRequest req;
  req.spec.seed = 7;
  const CommandOutput a = run_demo(req, dir.path() / "a");
  const CommandOutput b = run_demo(req, dir.path() / "b");
  CHECK(a.report_json == b.report_json);
  CHECK(slurp(dir.path() / "a" / "demo_report.json") == slurp(dir.path() / "b" / "demo_report.json"));
  CHECK(a.written.size() == 6);
  const json j = json::parse(a.report_json);
  CHECK(j["results"].contains("rpe_on"));
  CHECK(j["results"].contains("rpe_off"));
  CHECK(j.contains("rpe_gain"));
  CHECK(j["scene"]["seed"] == 7);

  req.mode = RpeMode::off;
  const json off = json::parse(run_demo(req, {}).report_json);
  CHECK_FALSE(off["results"].contains("rpe_on"));
  CHECK_FALSE(off.contains("rpe_gain"));
  CHECK(parse_rpe_mode("both") == RpeMode::both);
  CHECK_THROWS_AS(parse_rpe_mode("maybe"), Error);
}

TEST_CASE("demo on the identity rig without encodings has near zero error") {
  DemoRequest req;
  req.spec = identity_scene();
  req.mode = RpeMode::off;
  const json j = json::parse(run_demo(req, {}).report_json);
  CHECK(j["results"]["rpe_off"]["mean_abs_error"].get<double>() <= 0.05);
}

TEST_CASE("synth command writes six files deterministically") {
  TempDir dir("synth");
  SceneSpec spec = scene_preset("default");
  spec.texture = Texture::checker;
  spec.seed = 1;
  const CommandOutput a = run_synth(spec, dir.path() / "a");
  run_synth(spec, dir.path() / "b");
  CHECK(a.written.size() == 6);
  for (const auto& p : a.written) {
    CHECK(slurp(p) == slurp(dir.path() / "b" / p.filename()));
  }
  CHECK_THROWS_AS(scene_preset("studio"), Error);
}
