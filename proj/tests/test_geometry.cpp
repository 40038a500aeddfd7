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
#include <numbers>
#include <vector>

#include "doctest.h"
#include "stereokit/error.hpp"
#include "stereokit/geometry.hpp"
#include "stereokit/random.hpp"
#include "stereokit/reference.hpp"

using namespace stereokit;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Mat3 random_homography(Sampler& rng) {
  Mat3 m = Mat3::Identity();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) += rng.uniform(-0.2, 0.2);
  }
  m(0, 2) = rng.uniform(-20, 20);
  m(1, 2) = rng.uniform(-20, 20);
  m(2, 0) = rng.uniform(-1e-3, 1e-3);
  m(2, 1) = rng.uniform(-1e-3, 1e-3);
  return m;
}

CameraIntrinsics random_k(Sampler& rng) {
  return CameraIntrinsics::from_focal(rng.uniform(50, 500), rng.uniform(50, 500),
                                      rng.uniform(0, 100), rng.uniform(0, 100));
}

}  // namespace

TEST_CASE("project_point") {
  const auto id = CameraIntrinsics(Mat3::Identity());
  const Pixel a = project_point(id, CameraPose::identity(), Vec3(0, 0, 1), 1.0);
  CHECK(a.x == 0.0);
  CHECK(a.y == 0.0);
  const Pixel b = project_point(CameraIntrinsics::from_focal(2, 2, 0, 0), CameraPose::identity(),
                                Vec3(1, 0, 1), 1.0);
  CHECK(b.x == doctest::Approx(2.0));
  CHECK(b.y == doctest::Approx(0.0));
  CHECK_THROWS_AS(project_point(id, CameraPose::identity(), Vec3(0, 0, 1), 0.0), Error);

  Sampler rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto k = random_k(rng);
    const Mat3 m = axis_rotation(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), 1), 0.2);
    const Vec3 q(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(1, 3));
    const double depth = rng.uniform(0.5, 4);
    const Pixel p = project_point(k, CameraPose(m), q, depth);
    const Vec3 h = reference::matvec(reference::matmul(k.matrix(), m), q) / depth;
    CHECK(std::abs(p.x - h.x() / h.z()) <= 1e-9);
    CHECK(std::abs(p.y - h.y() / h.z()) <= 1e-9);
  }
}

TEST_CASE("homography_from_params") {
  const auto id = CameraIntrinsics(Mat3::Identity());
  CHECK(homography_from_params(id, CameraPose::identity(), id, CameraPose::identity())
            .matrix()
            .isApprox(Mat3::Identity(), 1e-15));

  const auto k = CameraIntrinsics::from_focal(120, 110, 64, 48);
  const Mat3 r = axis_rotation(Vec3::UnitY(), 5 * kDeg);
  const Homography h = homography_from_params(k, CameraPose::identity(), k, CameraPose(r));
  Mat3 oracle = reference::matmul(reference::matmul(k.matrix(), r), k.matrix().inverse());
  oracle /= oracle(2, 2);
  CHECK((h.matrix() - oracle).cwiseAbs().maxCoeff() <= 1e-9);

  const Homography back = homography_from_params(k, CameraPose(r), k, CameraPose::identity());
  CHECK(relative_frobenius_error(back.matrix(), h.matrix().inverse()) <= 1e-9);

  CHECK_THROWS_AS(CameraPose(Mat3::Zero()), Error);
}

TEST_CASE("homography_from_params is invariant to joint pose scaling") {
  Sampler rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto kl = random_k(rng), kr = random_k(rng);
    const Mat3 ml = axis_rotation(Vec3(rng.uniform(-1, 1), 1, 0), rng.uniform(-0.3, 0.3));
    const Mat3 mr = axis_rotation(Vec3(0, 1, rng.uniform(-1, 1)), rng.uniform(-0.3, 0.3));
    const double s = rng.uniform(0.2, 5.0) * (rng.uniform() < 0.5 ? -1 : 1);
    const Homography a = homography_from_params(kl, CameraPose(ml), kr, CameraPose(mr));
    const Homography b = homography_from_params(kl, CameraPose(s * ml), kr, CameraPose(s * mr));
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("plane-induced homography") {
  const auto k = CameraIntrinsics::from_focal(100, 100, 64, 48);
  const Mat3 r = axis_rotation(Vec3::UnitZ(), 3 * kDeg);
  const Homography zero_t = homography_induced_by_plane(k, k, r, Vec3::Zero(), Vec3::UnitZ(), 2.0);
  const Homography params = homography_from_params(k, CameraPose::identity(), k, CameraPose(r));
  CHECK((zero_t.matrix() - params.matrix()).cwiseAbs().maxCoeff() <= 1e-9);

  const auto k1 = CameraIntrinsics::from_focal(100, 100, 0, 0);
  const Homography shift = homography_induced_by_plane(k1, k1, Mat3::Identity(),
                                                       Vec3(0.1, 0, 0), Vec3::UnitZ(), 2.0);
  Mat3 expected = Mat3::Identity();
  expected(0, 2) = -100 * 0.1 / 2.0;
  CHECK((shift.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-12);

  const Homography far = homography_induced_by_plane(k, k, r, Vec3(0.3, 0.1, 0.05),
                                                     Vec3::UnitZ(), 1e6);
  CHECK((far.matrix() - params.matrix()).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK_THROWS_AS(
      homography_induced_by_plane(k, k, r, Vec3::Zero(), Vec3::UnitZ(), 0.0), Error);
}

TEST_CASE("apply_homography") {
  const Pixel q{3.5, -7.25};
  const Pixel same = apply_homography(Homography::identity(), q);
  CHECK(same.x == q.x);
  CHECK(same.y == q.y);
  const Pixel moved = apply_homography(Homography::translation(3, -2), q);
  CHECK(moved.x == doctest::Approx(6.5));
  CHECK(moved.y == doctest::Approx(-9.25));

  Mat3 vanishing = Mat3::Identity();
  vanishing(2, 0) = -1.0;
  vanishing(2, 2) = 1.0;
  CHECK_THROWS_AS(apply_homography(Homography(vanishing), Pixel{1.0, 0.0}), Error);

  Sampler rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Homography h(random_homography(rng));
    const Pixel p{rng.uniform(0, 128), rng.uniform(0, 96)};
    const Pixel a = apply_homography(h, p);
    const Pixel o = reference::map_pixel(h.matrix(), p);
    CHECK(std::abs(a.x - o.x) <= 1e-9);
    CHECK(std::abs(a.y - o.y) <= 1e-9);
    const Pixel round = apply_homography(h, apply_homography(h.inverse(), p));
    CHECK(std::abs(round.x - p.x) <= 1e-6);
    CHECK(std::abs(round.y - p.y) <= 1e-6);
  }
}

TEST_CASE("DLT recovers generating homographies") {
  std::vector<Correspondence> cs;
  for (double x : {0.0, 50.0, 100.0}) {
    for (double y : {0.0, 40.0, 80.0}) cs.push_back({{x, y}, {x, y}});
  }
  CHECK((fit_homography_dlt(cs).matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9);

  Sampler rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Homography h(random_homography(rng));
    std::vector<Correspondence> pts;
    for (int i = 0; i < 8; ++i) {
      const Pixel p{rng.uniform(0, 128), rng.uniform(0, 96)};
      pts.push_back({p, apply_homography(h, p)});
    }
    CHECK(relative_frobenius_error(fit_homography_dlt(pts).matrix(), h.matrix()) <= 1e-6);
  }
}

TEST_CASE("DLT rejects too few points and degenerate layouts") {
  std::vector<Correspondence> three = {{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}};
  CHECK_THROWS_AS(fit_homography_dlt(three), Error);
  std::vector<Correspondence> collinear = {
      {{0, 0}, {0, 0}}, {{1, 1}, {1, 1}}, {{2, 2}, {2, 2}}, {{5, 1}, {5, 1}}};
  try {
    fit_homography_dlt(collinear);
    FAIL("expected a degenerate configuration error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate);
  }
}

TEST_CASE("perturbation is seeded and has the requested spread") {
  const Homography h(Mat3::Identity());
  CHECK(perturb_homography(h, 0.0, 7).matrix() == h.matrix());
  CHECK(perturb_homography(h, 0.1, 7).matrix() == perturb_homography(h, 0.1, 7).matrix());
  CHECK(perturb_homography(h, 0.1, 7).matrix() != perturb_homography(h, 0.1, 8).matrix());
  CHECK_THROWS_AS(perturb_homography(h, -0.1, 7), Error);

  // Noise is drawn with the named generator and added before renormalising;
  // replaying the draws recovers the unnormalised sample exactly.
  const double sigma = 0.1;
  const int draws = 10000;
  Mat3 sum = Mat3::Zero(), sq = Mat3::Zero();
  for (int s = 0; s < draws; ++s) {
    Sampler rng(static_cast<std::uint64_t>(s));
    Mat3 noisy = h.matrix();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) noisy(r, c) += rng.normal(0.0, sigma);
    }
    const Mat3 got = perturb_homography(h, sigma, static_cast<std::uint64_t>(s)).matrix();
    REQUIRE(relative_frobenius_error(got, noisy) <= 1e-12);
    sum += noisy;
    sq += noisy.cwiseProduct(noisy);
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double mean = sum(r, c) / draws;
      const double sd = std::sqrt(sq(r, c) / draws - mean * mean);
      CHECK(std::abs(mean - h.matrix()(r, c)) <= 0.01);
      CHECK(std::abs(sd - sigma) <= 0.1 * sigma);
    }
  }
}

TEST_CASE("frame change, formatting and parsing") {
  Sampler rng(5);
  const Homography h(random_homography(rng));
  const Mat3 f = pixel_to_unit_frame(128, 96);
  const Homography unit = change_frame(h, f);
  const Homography back = change_frame(unit, f.inverse());
  CHECK(relative_frobenius_error(back.matrix(), h.matrix()) <= 1e-12);
  const Pixel corner = reference::map_pixel(f, Pixel{127, 95});
  CHECK(corner.x == doctest::Approx(1.0));
  CHECK(corner.y == doctest::Approx(1.0));

  const Homography parsed = parse_homography(format_homography(h));
  CHECK((parsed.matrix() - h.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(parse_homography("1 2 3"), Error);
}
