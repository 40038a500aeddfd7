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

#include "stereokit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "stereokit/encoding.hpp"
#include "stereokit/error.hpp"
#include "stereokit/image_io.hpp"

namespace stereokit {

const char* to_string(Texture t) noexcept {
  switch (t) {
    case Texture::checker: return "checker";
    case Texture::value_noise: return "value_noise";
    case Texture::random_dots: return "random_dots";
  }
  return "unknown";
}

Texture parse_texture(const std::string& name) {
  if (name == "checker") return Texture::checker;
  if (name == "value_noise" || name == "perlin") return Texture::value_noise;
  if (name == "random_dots" || name == "dots") return Texture::random_dots;
  fail(ErrorCode::invalid_argument,
       "unknown texture '" + name + "' (valid: checker, value_noise, random_dots)");
}

std::vector<std::string> texture_names() { return {"checker", "value_noise", "random_dots"}; }

void SceneSpec::validate() const {
  require(width >= 16 && height >= 16, ErrorCode::invalid_argument,
          "scene extents must be >= 16 pixels");
  require(channels >= 1, ErrorCode::invalid_argument, "scene needs at least one channel");
  require(texture_scale > 0.0 && std::isfinite(texture_scale), ErrorCode::invalid_argument,
          "texture_scale must be > 0");
  require(plane_depth > 0.0 && std::isfinite(plane_depth), ErrorCode::invalid_argument,
          "plane_depth must be > 0");
  require(rig.focal > 0.0, ErrorCode::invalid_argument, "focal length must be > 0");
}

CameraIntrinsics SceneSpec::intrinsics() const {
  const double cx = rig.cx < 0.0 ? (width - 1) / 2.0 : rig.cx;
  const double cy = rig.cy < 0.0 ? (height - 1) / 2.0 : rig.cy;
  return CameraIntrinsics::from_focal(rig.focal, rig.focal, cx, cy);
}

Mat3 SceneSpec::rotation() const {
  constexpr double deg = std::numbers::pi / 180.0;
  return axis_rotation(Vec3::UnitZ(), rig.roll_deg * deg) *
         axis_rotation(Vec3::UnitX(), rig.pitch_deg * deg) *
         axis_rotation(Vec3::UnitY(), rig.yaw_deg * deg);
}

SceneSpec default_scene() { return SceneSpec{}; }

SceneSpec misaligned_scene() {
  SceneSpec s;
  s.rig.roll_deg = 2.0;
  return s;
}

SceneSpec identity_scene() {
  SceneSpec s;
  s.rig.translation = Vec3::Zero();
  return s;
}

namespace {

// splitmix64 finaliser; lattice values are hashed rather than stored.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double hash_unit(std::uint64_t seed, std::uint64_t channel, std::int64_t ix, std::int64_t iy,
                 std::uint64_t salt) {
  std::uint64_t h = mix(seed ^ mix(channel + 0x51ed27ULL * salt));
  h = mix(h ^ static_cast<std::uint64_t>(ix));
  h = mix(h ^ static_cast<std::uint64_t>(iy) * 0x632be59bd9b4e019ULL);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(const SceneSpec& s, std::uint32_t c, double x, double y) {
  const double u = x / s.texture_scale;
  const double v = y / s.texture_scale;
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const auto ix = static_cast<std::int64_t>(fu);
  const auto iy = static_cast<std::int64_t>(fv);
  const double tu = smoothstep(u - fu);
  const double tv = smoothstep(v - fv);
  const double v00 = hash_unit(s.seed, c, ix, iy, 1);
  const double v10 = hash_unit(s.seed, c, ix + 1, iy, 1);
  const double v01 = hash_unit(s.seed, c, ix, iy + 1, 1);
  const double v11 = hash_unit(s.seed, c, ix + 1, iy + 1, 1);
  return (v00 * (1 - tu) + v10 * tu) * (1 - tv) + (v01 * (1 - tu) + v11 * tu) * tv;
}

double checker(const SceneSpec& s, std::uint32_t c, double x, double y) {
  const double ox = hash_unit(s.seed, c, 0, 0, 2) * s.texture_scale;
  const double oy = hash_unit(s.seed, c, 0, 0, 3) * s.texture_scale;
  const double lo = 0.1 + 0.3 * hash_unit(s.seed, c, 0, 0, 4);
  const double hi = 0.6 + 0.3 * hash_unit(s.seed, c, 0, 0, 5);
  const auto cell = static_cast<std::int64_t>(std::floor((x + ox) / s.texture_scale)) +
                    static_cast<std::int64_t>(std::floor((y + oy) / s.texture_scale));
  return (cell & 1) ? hi : lo;
}

// One Gaussian blob per 2s x 2s cell, sigma = s / 3.
double random_dots(const SceneSpec& s, std::uint32_t c, double x, double y) {
  const double cell = 2.0 * s.texture_scale;
  const double sigma = s.texture_scale / 3.0;
  const auto cx = static_cast<std::int64_t>(std::floor(x / cell));
  const auto cy = static_cast<std::int64_t>(std::floor(y / cell));
  double value = 0.15;
  for (std::int64_t j = cy - 1; j <= cy + 1; ++j)
    for (std::int64_t i = cx - 1; i <= cx + 1; ++i) {
      const double px = (i + hash_unit(s.seed, c, i, j, 6)) * cell;
      const double py = (j + hash_unit(s.seed, c, i, j, 7)) * cell;
      const double amp = 0.3 + 0.55 * hash_unit(s.seed, c, i, j, 8);
      const double r2 = (x - px) * (x - px) + (y - py) * (y - py);
      value += amp * std::exp(-r2 / (2.0 * sigma * sigma));
    }
  return std::clamp(value, 0.0, 1.0);
}

bool inside(const Dims& d, double x, double y) {
  constexpr double slack = 1e-9;
  return x >= -slack && y >= -slack && x <= d.w - 1.0 + slack && y <= d.h - 1.0 + slack;
}

}  // namespace

double texture_value(const SceneSpec& spec, std::uint32_t channel, double x, double y) {
  switch (spec.texture) {
    case Texture::checker: return checker(spec, channel, x, y);
    case Texture::value_noise: return value_noise(spec, channel, x, y);
    case Texture::random_dots: return random_dots(spec, channel, x, y);
  }
  return 0.0;
}

Tensor render_texture(const SceneSpec& spec) {
  spec.validate();
  Tensor img(Dims{1, spec.channels, spec.height, spec.width});
  for (std::uint32_t c = 0; c < spec.channels; ++c)
    for (std::uint32_t y = 0; y < spec.height; ++y) {
      auto row = img.row(0, c, y);
      for (std::uint32_t x = 0; x < spec.width; ++x) {
        row[x] = static_cast<float>(texture_value(spec, c, x, y));
      }
    }
  return img;
}

std::pair<Tensor, Tensor> warp_with_homography(const Tensor& img, const Homography& h) {
  const Dims& d = img.dims();
  const Homography inv = h.inverse();
  Tensor out(d);
  Tensor valid(Dims{d.n, 1, d.h, d.w});
  for (std::uint32_t y = 0; y < d.h; ++y)
    for (std::uint32_t x = 0; x < d.w; ++x) {
      const Pixel src = apply_homography(inv, Pixel{double(x), double(y)});
      if (!inside(d, src.x, src.y)) continue;
      const double sx = std::clamp(src.x, 0.0, d.w - 1.0);
      const double sy = std::clamp(src.y, 0.0, d.h - 1.0);
      const auto x0 = static_cast<std::uint32_t>(std::floor(sx));
      const auto y0 = static_cast<std::uint32_t>(std::floor(sy));
      const std::uint32_t x1 = std::min(x0 + 1, d.w - 1);
      const std::uint32_t y1 = std::min(y0 + 1, d.h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (std::uint32_t n = 0; n < d.n; ++n) {
        valid.at(n, 0, y, x) = 1.0f;
        for (std::uint32_t c = 0; c < d.c; ++c) {
          const double top = img.at(n, c, y0, x0) * (1.0 - fx) + img.at(n, c, y0, x1) * fx;
          const double bottom = img.at(n, c, y1, x0) * (1.0 - fx) + img.at(n, c, y1, x1) * fx;
          out.at(n, c, y, x) = static_cast<float>(top * (1.0 - fy) + bottom * fy);
        }
      }
    }
  return {std::move(out), std::move(valid)};
}

StereoSample generate_scene(const SceneSpec& spec) {
  spec.validate();
  const CameraIntrinsics k = spec.intrinsics();
  const Mat3 rotation = spec.rotation();
  const Vec3 normal = spec.rig.normal.normalized();

  // Every visible plane point must lie in front of both cameras. Depth is
  // affine on the plane, so checking the image corners suffices.
  const Mat3 k_inv = k.matrix().inverse();
  for (double cy : {0.0, spec.height - 1.0})
    for (double cx : {0.0, spec.width - 1.0}) {
      const Vec3 ray = k_inv * Vec3(cx, cy, 1.0);
      const double along = normal.dot(ray);
      require(along > 0.0, ErrorCode::domain, "degenerate rig: the plane is behind the left camera");
      const Vec3 point = ray * (spec.plane_depth / along);
      const Vec3 in_right = rotation * point - spec.rig.translation;
      require(in_right.z() > 0.0, ErrorCode::domain,
              "degenerate rig: the plane is behind the right camera");
    }

  StereoSample s;
  s.gt_homography =
      homography_induced_by_plane(k, k, rotation, spec.rig.translation, normal, spec.plane_depth);
  s.left = render_texture(spec);
  s.right = warp_with_homography(s.left, s.gt_homography).first;
  const Dims dims{1, 1, spec.height, spec.width};
  s.gt_disparity = Tensor(dims);
  s.validity = Tensor(dims);
  for (std::uint32_t y = 0; y < spec.height; ++y)
    for (std::uint32_t x = 0; x < spec.width; ++x) {
      const Pixel r = apply_homography(s.gt_homography, Pixel{double(x), double(y)});
      s.gt_disparity.at(0, 0, y, x) = static_cast<float>(x - r.x);
      s.validity.at(0, 0, y, x) = inside(dims, r.x, r.y) ? 1.0f : 0.0f;
    }
  return s;
}

DemoReport end_to_end_demo(const StereoSample& sample, const CostVolumeConfig& cfg,
                           const DemoOptions& opts) {
  const Dims& d = sample.left.dims();
  cfg.validate(d);

  double max_disp = 0.0;
  double min_disp = 0.0;
  double max_drift = 0.0;
  bool any_valid = false;
  for (std::uint32_t y = 0; y < d.h; ++y)
    for (std::uint32_t x = 0; x < d.w; ++x) {
      if (sample.validity.at(0, 0, y, x) == 0.0f) continue;
      const double disp = sample.gt_disparity.at(0, 0, y, x);
      const Pixel r = apply_homography(sample.gt_homography, Pixel{double(x), double(y)});
      max_disp = any_valid ? std::max(max_disp, disp) : disp;
      min_disp = any_valid ? std::min(min_disp, disp) : disp;
      max_drift = std::max(max_drift, std::abs(r.y - y));
      any_valid = true;
    }
  require(any_valid, ErrorCode::invalid_argument, "scene has no valid pixels");
  require(max_disp <= cfg.max_disparity - 0.5, ErrorCode::invalid_argument,
          "max_disparity " + std::to_string(cfg.max_disparity) +
              " is smaller than the true disparity " + std::to_string(max_disp));
  require(min_disp >= -0.5, ErrorCode::invalid_argument,
          "scene has negative disparities, which the cost volume cannot represent");
  require(max_drift <= opts.max_vertical_drift, ErrorCode::invalid_argument,
          "vertical drift " + std::to_string(max_drift) + " px exceeds the demo bound");

  CostVolume cv;
  if (opts.use_rpe) {
    EncodingParams p;
    p.channels = opts.encoding_channels == 0 ? d.c : opts.encoding_channels;
    p.frequency = opts.encoding_frequency;
    require(p.channels == d.c, ErrorCode::invalid_argument,
            "encoding channels must match the image channel count");
    auto [left_pe, right_pe] = rpe_map(sample.gt_homography, d.w, d.h, p);
    const EncodingMap left_scaled = rescale_encoding(left_pe);
    const EncodingMap right_scaled = rescale_encoding(right_pe);
    cv = multi_head_cost_volume(sample.left, sample.right, cfg,
                                EncodingInjection{left_scaled.values, right_scaled.values});
  } else {
    cv = multi_head_cost_volume(sample.left, sample.right, cfg);
  }

  DemoReport report;
  report.use_rpe = opts.use_rpe;
  report.disparity = argmax_disparity(cv);
  double err = 0.0;
  for (std::uint32_t y = 0; y < d.h; ++y)
    for (std::uint32_t x = 0; x < d.w; ++x) {
      if (sample.validity.at(0, 0, y, x) == 0.0f) continue;
      err += std::abs(double(report.disparity.at(0, 0, y, x)) - sample.gt_disparity.at(0, 0, y, x));
      ++report.valid_pixels;
    }
  report.mean_abs_error = err / static_cast<double>(report.valid_pixels);
  return report;
}

DemoReport end_to_end_demo(const SceneSpec& spec, const CostVolumeConfig& cfg,
                           const DemoOptions& opts) {
  return end_to_end_demo(generate_scene(spec), cfg, opts);
}

std::string scene_to_json(const SceneSpec& s) {
  nlohmann::json rig{{"focal", s.rig.focal},
                     {"cx", s.rig.cx},
                     {"cy", s.rig.cy},
                     {"roll_deg", s.rig.roll_deg},
                     {"pitch_deg", s.rig.pitch_deg},
                     {"yaw_deg", s.rig.yaw_deg},
                     {"translation", {s.rig.translation.x(), s.rig.translation.y(),
                                      s.rig.translation.z()}},
                     {"normal", {s.rig.normal.x(), s.rig.normal.y(), s.rig.normal.z()}}};
  nlohmann::json j{{"width", s.width},
                   {"height", s.height},
                   {"channels", s.channels},
                   {"texture", to_string(s.texture)},
                   {"texture_scale", s.texture_scale},
                   {"plane_depth", s.plane_depth},
                   {"seed", s.seed},
                   {"rig", rig}};
  return j.dump(2);
}

SceneSpec scene_from_json(const std::string& text, const SceneSpec& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("invalid scene JSON: ") + e.what());
  }
  SceneSpec s = base;
  try {
    if (j.contains("width")) s.width = j.at("width").get<std::uint32_t>();
    if (j.contains("height")) s.height = j.at("height").get<std::uint32_t>();
    if (j.contains("channels")) s.channels = j.at("channels").get<std::uint32_t>();
    if (j.contains("texture")) s.texture = parse_texture(j.at("texture").get<std::string>());
    if (j.contains("texture_scale")) s.texture_scale = j.at("texture_scale").get<double>();
    if (j.contains("plane_depth")) s.plane_depth = j.at("plane_depth").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rig")) {
      const auto& r = j.at("rig");
      if (r.contains("focal")) s.rig.focal = r.at("focal").get<double>();
      if (r.contains("cx")) s.rig.cx = r.at("cx").get<double>();
      if (r.contains("cy")) s.rig.cy = r.at("cy").get<double>();
      if (r.contains("roll_deg")) s.rig.roll_deg = r.at("roll_deg").get<double>();
      if (r.contains("pitch_deg")) s.rig.pitch_deg = r.at("pitch_deg").get<double>();
      if (r.contains("yaw_deg")) s.rig.yaw_deg = r.at("yaw_deg").get<double>();
      if (r.contains("translation")) {
        const auto t = r.at("translation").get<std::vector<double>>();
        require(t.size() == 3, ErrorCode::invalid_argument, "rig.translation needs 3 numbers");
        s.rig.translation = Vec3(t[0], t[1], t[2]);
      }
      if (r.contains("normal")) {
        const auto n = r.at("normal").get<std::vector<double>>();
        require(n.size() == 3, ErrorCode::invalid_argument, "rig.normal needs 3 numbers");
        s.rig.normal = Vec3(n[0], n[1], n[2]);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("invalid scene field: ") + e.what());
  }
  s.validate();
  return s;
}

std::vector<std::filesystem::path> export_sample(const StereoSample& sample, const SceneSpec& spec,
                                                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), ErrorCode::io,
          "cannot create output directory " + dir.string());
  std::vector<std::filesystem::path> written;
  auto record = [&](const std::filesystem::path& p) { written.push_back(p); };

  save_png(dir / "left.png", sample.left);
  record(dir / "left.png");
  save_png(dir / "right.png", sample.right);
  record(dir / "right.png");
  save_sten(dir / "gt_disparity.sten", sample.gt_disparity);
  record(dir / "gt_disparity.sten");
  {
    std::ofstream os(dir / "gt_homography.txt");
    os << format_homography(sample.gt_homography) << '\n';
    require(static_cast<bool>(os), ErrorCode::io, "failed writing gt_homography.txt");
  }
  record(dir / "gt_homography.txt");
  save_sten(dir / "validity.sten", sample.validity);
  record(dir / "validity.sten");
  {
    std::ofstream os(dir / "spec.json");
    os << scene_to_json(spec) << '\n';
    require(static_cast<bool>(os), ErrorCode::io, "failed writing spec.json");
  }
  record(dir / "spec.json");
  return written;
}

}  // namespace stereokit
