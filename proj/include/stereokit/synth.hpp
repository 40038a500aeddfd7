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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stereokit/costvol.hpp"
#include "stereokit/geometry.hpp"
#include "stereokit/tensor.hpp"

namespace stereokit {

enum class Texture { checker, value_noise, random_dots };

const char* to_string(Texture t) noexcept;
/// Accepts "checker", "value_noise" (alias "perlin") and "random_dots" (alias "dots").
Texture parse_texture(const std::string& name);
std::vector<std::string> texture_names();

/// Two-camera rig imaging a textured plane n.X = plane_depth in the left frame.
struct RigSpec {
  double focal = 100.0;
  /// Principal point; negative selects the image centre.
  double cx = -1.0;
  double cy = -1.0;
  /// Right-camera rotation R = Rz(roll) Rx(pitch) Ry(yaw), degrees.
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
  Vec3 translation = Vec3(0.08, 0.0, 0.0);
  Vec3 normal = Vec3(0.0, 0.0, 1.0);
};

struct SceneSpec {
  std::uint32_t width = 128;
  std::uint32_t height = 96;
  std::uint32_t channels = 4;
  Texture texture = Texture::value_noise;
  double texture_scale = 4.0;
  double plane_depth = 1.0;
  RigSpec rig;
  std::uint64_t seed = 0;

  void validate() const;
  CameraIntrinsics intrinsics() const;
  Mat3 rotation() const;
};

/// Rectified rig: pure horizontal baseline, fronto-parallel plane, 8 px disparity.
SceneSpec default_scene();
/// Default scene with the right camera rolled by 2 degrees.
SceneSpec misaligned_scene();
/// t = 0, R = I.
SceneSpec identity_scene();

struct StereoSample {
  Tensor left;           // [1, C, H, W], values in [0, 1]
  Tensor right;          // left warped by gt_homography
  Tensor gt_disparity;   // [1, 1, H, W], left frame: x - (H q).x
  Homography gt_homography = Homography::identity();
  /// [1, 1, H, W], left frame: 1 where H q lands inside the right image.
  Tensor validity;
};

/// Procedural texture for one channel evaluated at continuous coordinates;
/// values in [0, 1].
double texture_value(const SceneSpec& spec, std::uint32_t channel, double x, double y);

Tensor render_texture(const SceneSpec& spec);

/// Inverse warp with bilinear sampling: out(r) = img(H^-1 r). Pixels whose
/// preimage leaves the image are 0 and marked invalid.
std::pair<Tensor, Tensor> warp_with_homography(const Tensor& img, const Homography& h);

StereoSample generate_scene(const SceneSpec& spec);

struct DemoOptions {
  bool use_rpe = false;
  std::uint32_t encoding_channels = 0;  // 0: image channel count
  double encoding_frequency = 200.0;
  double max_vertical_drift = 8.0;
};

struct DemoReport {
  bool use_rpe = false;
  double mean_abs_error = 0.0;
  std::uint64_t valid_pixels = 0;
  Tensor disparity;  // argmax readout [1, 1, H, W]
};

/// Multi-head cost volume on the raw image channels, optionally with
/// rectification encodings built from the ground-truth homography, read out
/// by argmax and scored against the ground-truth disparity on valid pixels.
DemoReport end_to_end_demo(const StereoSample& sample, const CostVolumeConfig& cfg,
                           const DemoOptions& opts);
DemoReport end_to_end_demo(const SceneSpec& spec, const CostVolumeConfig& cfg,
                           const DemoOptions& opts);

std::string scene_to_json(const SceneSpec& spec);
/// Starts from `base` and overrides any keys present in `json`.
SceneSpec scene_from_json(const std::string& json, const SceneSpec& base = SceneSpec{});

/// Writes left.png, right.png, gt_disparity.sten, gt_homography.txt,
/// validity.sten and spec.json into `dir`; returns the written paths.
std::vector<std::filesystem::path> export_sample(const StereoSample& sample, const SceneSpec& spec,
                                                 const std::filesystem::path& dir);

}  // namespace stereokit
