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
#include <span>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

namespace stereokit {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

struct Pixel {
  double x = 0.0;
  double y = 0.0;
};

/// Pinhole intrinsics: focal lengths on the diagonal, principal point in the
/// last column, K(2,2) = 1.
class CameraIntrinsics {
 public:
  explicit CameraIntrinsics(const Mat3& k);
  static CameraIntrinsics from_focal(double fx, double fy, double cx, double cy);

  const Mat3& matrix() const noexcept { return k_; }

 private:
  Mat3 k_;
};

/// Invertible 3x3 plane-mapping part of a camera's extrinsics.
class CameraPose {
 public:
  explicit CameraPose(const Mat3& m);
  static CameraPose identity() { return CameraPose(Mat3::Identity()); }

  const Mat3& matrix() const noexcept { return m_; }

 private:
  Mat3 m_;
};

/// Invertible 3x3 map from left-image to right-image homogeneous pixels,
/// scaled so that H(2,2) = 1 whenever |H(2,2)| > 1e-9.
class Homography {
 public:
  explicit Homography(const Mat3& h);
  static Homography identity() { return Homography(Mat3::Identity()); }
  static Homography translation(double tx, double ty);

  const Mat3& matrix() const noexcept { return h_; }
  Homography inverse() const;
  /// this * other: apply `other` first.
  Homography compose(const Homography& other) const;

 private:
  Mat3 h_;
};

struct Correspondence {
  Pixel left;
  Pixel right;
};

/// q = K M Q / depth, dehomogenised.
Pixel project_point(const CameraIntrinsics& k, const CameraPose& m, const Vec3& point,
                    double depth);

/// H = K_r M_r M_l^-1 K_l^-1, valid when the point depths in both views are
/// approximately equal.
Homography homography_from_params(const CameraIntrinsics& k_left, const CameraPose& m_left,
                                  const CameraIntrinsics& k_right, const CameraPose& m_right);

/// H = K_r (R - t n^T / plane_depth) K_l^-1 for the plane n.X = plane_depth in
/// the left camera frame.
Homography homography_induced_by_plane(const CameraIntrinsics& k_left,
                                       const CameraIntrinsics& k_right, const Mat3& rotation,
                                       const Vec3& translation, const Vec3& normal,
                                       double plane_depth);

/// Throws ErrorCode::domain when the mapped point lies at infinity.
Pixel apply_homography(const Homography& h, Pixel q);

/// Normalised direct linear transform over >= 4 correspondences.
Homography fit_homography_dlt(std::span<const Correspondence> correspondences);

/// Adds N(0, sigma) to each of the nine elements, then renormalises.
Homography perturb_homography(const Homography& h, double sigma, std::uint64_t seed);

/// Similarity transform taking pixel coordinates of a width x height image to
/// [-1, 1] x [-1, 1] (pixel centres at the extremes map to +-1).
Mat3 pixel_to_unit_frame(std::uint32_t width, std::uint32_t height);

/// Expresses h in the frame defined by `frame`: frame * h * frame^-1.
Homography change_frame(const Homography& h, const Mat3& frame);

/// Rotation by `radians` about `axis` (normalised internally).
Mat3 axis_rotation(const Vec3& axis, double radians);

/// ||a/|a| - s b/|b|||_F with s = +-1 chosen to minimise; zero iff a and b
/// are equal up to a non-zero scale.
double relative_frobenius_error(const Mat3& a, const Mat3& b);

/// Nine row-major numbers on one line.
std::string format_homography(const Homography& h);
Homography parse_homography(const std::string& text);

}  // namespace stereokit
