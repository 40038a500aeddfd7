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

#include "stereokit/geometry.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "stereokit/error.hpp"
#include "stereokit/random.hpp"

namespace stereokit {
namespace {

bool all_finite(const Mat3& m) { return m.allFinite(); }

// |det| relative to the matrix scale; a scale-free singularity test.
bool is_invertible(const Mat3& m) {
  const double scale = m.norm();
  if (!(scale > 0.0) || !std::isfinite(scale)) return false;
  return std::abs(m.determinant()) > 1e-12 * scale * scale * scale;
}

}  // namespace

CameraIntrinsics::CameraIntrinsics(const Mat3& k) : k_(k) {
  require(all_finite(k), ErrorCode::invalid_argument, "intrinsics must be finite");
  require(k(2, 2) == 1.0, ErrorCode::invalid_argument, "intrinsics must have K(2,2) = 1");
  require(is_invertible(k), ErrorCode::domain, "intrinsics matrix is singular");
}

CameraIntrinsics CameraIntrinsics::from_focal(double fx, double fy, double cx, double cy) {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return CameraIntrinsics(k);
}

CameraPose::CameraPose(const Mat3& m) : m_(m) {
  require(all_finite(m), ErrorCode::invalid_argument, "pose must be finite");
  require(is_invertible(m), ErrorCode::domain, "pose matrix is singular");
}

Homography::Homography(const Mat3& h) : h_(h) {
  require(all_finite(h), ErrorCode::invalid_argument, "homography must be finite");
  require(is_invertible(h), ErrorCode::domain, "homography is singular");
  if (std::abs(h_(2, 2)) > 1e-9) h_ /= h_(2, 2);
}

Homography Homography::translation(double tx, double ty) {
  Mat3 h = Mat3::Identity();
  h(0, 2) = tx;
  h(1, 2) = ty;
  return Homography(h);
}

Homography Homography::inverse() const { return Homography(h_.inverse()); }

Homography Homography::compose(const Homography& other) const {
  return Homography(h_ * other.h_);
}

Pixel project_point(const CameraIntrinsics& k, const CameraPose& m, const Vec3& point,
                    double depth) {
  require(depth > 0.0, ErrorCode::invalid_argument, "projection depth must be > 0");
  const Vec3 q = (k.matrix() * (m.matrix() * point)) / depth;
  require(std::abs(q.z()) > 1e-12, ErrorCode::domain, "projected point lies at infinity");
  return {q.x() / q.z(), q.y() / q.z()};
}

Homography homography_from_params(const CameraIntrinsics& k_left, const CameraPose& m_left,
                                  const CameraIntrinsics& k_right, const CameraPose& m_right) {
  return Homography(k_right.matrix() * m_right.matrix() * m_left.matrix().inverse() *
                    k_left.matrix().inverse());
}

Homography homography_induced_by_plane(const CameraIntrinsics& k_left,
                                       const CameraIntrinsics& k_right, const Mat3& rotation,
                                       const Vec3& translation, const Vec3& normal,
                                       double plane_depth) {
  require(plane_depth > 0.0, ErrorCode::invalid_argument, "plane depth must be > 0");
  require(std::abs(normal.norm() - 1.0) < 1e-9, ErrorCode::invalid_argument,
          "plane normal must be a unit vector");
  require(rotation.allFinite() && translation.allFinite(), ErrorCode::invalid_argument,
          "rig rotation and translation must be finite");
  const Mat3 plane_map = rotation - translation * normal.transpose() / plane_depth;
  return Homography(k_right.matrix() * plane_map * k_left.matrix().inverse());
}

Pixel apply_homography(const Homography& h, Pixel q) {
  const Vec3 p = h.matrix() * Vec3(q.x, q.y, 1.0);
  if (!(std::abs(p.z()) > 1e-12)) {
    std::ostringstream os;
    os << "pixel (" << q.x << ", " << q.y << ") maps to a point at infinity";
    fail(ErrorCode::domain, os.str());
  }
  return {p.x() / p.z(), p.y() / p.z()};
}

namespace {

// Hartley conditioning: centroid to the origin, mean distance sqrt(2).
Mat3 conditioning_transform(const std::vector<Pixel>& pts) {
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(pts.size());
  require(mean_dist > 0.0, ErrorCode::degenerate, "all correspondence points coincide");
  const double s = std::sqrt(2.0) / mean_dist;
  Mat3 t;
  t << s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0;
  return t;
}

Pixel transform(const Mat3& t, const Pixel& p) {
  return {t(0, 0) * p.x + t(0, 2), t(1, 1) * p.y + t(1, 2)};
}

}  // namespace

Homography fit_homography_dlt(std::span<const Correspondence> cs) {
  require(cs.size() >= 4, ErrorCode::invalid_argument,
          "DLT needs at least 4 correspondences, got " + std::to_string(cs.size()));
  std::vector<Pixel> left;
  std::vector<Pixel> right;
  left.reserve(cs.size());
  right.reserve(cs.size());
  for (const auto& c : cs) {
    require(std::isfinite(c.left.x) && std::isfinite(c.left.y) && std::isfinite(c.right.x) &&
                std::isfinite(c.right.y),
            ErrorCode::invalid_argument, "correspondence coordinates must be finite");
    left.push_back(c.left);
    right.push_back(c.right);
  }
  const Mat3 t_left = conditioning_transform(left);
  const Mat3 t_right = conditioning_transform(right);

  Eigen::MatrixXd a(2 * cs.size(), 9);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Pixel l = transform(t_left, left[i]);
    const Pixel r = transform(t_right, right[i]);
    a.row(2 * i) << -l.x, -l.y, -1.0, 0.0, 0.0, 0.0, r.x * l.x, r.x * l.y, r.x;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, -l.x, -l.y, -1.0, r.y * l.x, r.y * l.y, r.y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::VectorXd sv = Eigen::VectorXd::Zero(9);
  sv.head(svd.singularValues().size()) = svd.singularValues();
  // A unique solution needs a one-dimensional null space.
  require(sv(7) - sv(8) > 1e-9 * sv(0), ErrorCode::degenerate,
          "degenerate correspondence configuration (collinear or repeated points)");

  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography(t_right.inverse() * hn * t_left);
}

Homography perturb_homography(const Homography& h, double sigma, std::uint64_t seed) {
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorCode::invalid_argument,
          "noise sigma must be >= 0");
  if (sigma == 0.0) return h;
  Sampler rng(seed);
  Mat3 noisy = h.matrix();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) noisy(r, c) += rng.normal(0.0, sigma);
  return Homography(noisy);
}

Mat3 pixel_to_unit_frame(std::uint32_t width, std::uint32_t height) {
  require(width >= 2 && height >= 2, ErrorCode::invalid_argument,
          "unit frame needs an image of at least 2x2 pixels");
  const double sx = 2.0 / (width - 1.0);
  const double sy = 2.0 / (height - 1.0);
  Mat3 t;
  t << sx, 0.0, -1.0, 0.0, sy, -1.0, 0.0, 0.0, 1.0;
  return t;
}

Homography change_frame(const Homography& h, const Mat3& frame) {
  return Homography(frame * h.matrix() * frame.inverse());
}

Mat3 axis_rotation(const Vec3& axis, double radians) {
  require(axis.norm() > 0.0, ErrorCode::invalid_argument, "rotation axis must be non-zero");
  return Eigen::AngleAxisd(radians, axis.normalized()).toRotationMatrix();
}

double relative_frobenius_error(const Mat3& a, const Mat3& b) {
  const Mat3 an = a / a.norm();
  const Mat3 bn = b / b.norm();
  return std::min((an - bn).norm(), (an + bn).norm());
}

std::string format_homography(const Homography& h) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) os << (r || c ? " " : "") << h.matrix()(r, c);
  return os.str();
}

Homography parse_homography(const std::string& text) {
  std::istringstream is(text);
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      require(static_cast<bool>(is >> m(r, c)), ErrorCode::io,
              "homography text must hold 9 numbers");
    }
  return Homography(m);
}

}  // namespace stereokit
