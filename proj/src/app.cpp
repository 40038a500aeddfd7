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

#include "stereokit/app.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "stereokit/costvol.hpp"
#include "stereokit/error.hpp"
#include "stereokit/image_io.hpp"

namespace stereokit {
namespace {

using nlohmann::json;

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), ErrorCode::io,
          "cannot create output directory " + dir.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  require(static_cast<bool>(os), ErrorCode::io, "failed writing " + path.string());
}

// Channel `index` of a cost volume as a [1, 1, H, W] map.
Tensor slice_channel(const Tensor& t, std::uint32_t index) {
  const Dims& d = t.dims();
  Tensor out(Dims{1, 1, d.h, d.w});
  const auto src = t.data().subspan(t.offset(0, index, 0, 0), d.plane());
  std::copy(src.begin(), src.end(), out.data().begin());
  return out;
}

json map_stats(const Tensor& map) {
  const auto v = map.data();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return {{"min", *lo}, {"max", *hi}, {"mean", mean}};
}

std::uint32_t largest_head_count(std::uint32_t channels) {
  for (std::uint32_t h : {4u, 3u, 2u}) {
    if (channels % h == 0) return h;
  }
  return 1;
}

Tensor scaled(const Tensor& t, float factor) {
  Tensor out = t;
  for (float& v : out.data()) v = std::clamp(v * factor, 0.0f, 1.0f);
  return out;
}

}  // namespace

CommandOutput run_simmap(const std::filesystem::path& left_png,
                         const std::filesystem::path& right_png, std::uint32_t offset,
                         const std::filesystem::path& out_dir) {
  const Tensor left = load_png(left_png);
  const Tensor right = load_png(right_png);
  require(left.dims() == right.dims(), ErrorCode::shape_mismatch,
          "image sizes differ: " + to_string(left.dims()) + " vs " + to_string(right.dims()));
  const Dims& d = left.dims();
  require(offset + 1 < d.w, ErrorCode::invalid_argument,
          "offset " + std::to_string(offset) + " needs an image wider than " +
              std::to_string(offset + 1) + " pixels");

  const std::uint32_t depth = offset + 1;
  const std::uint32_t heads = largest_head_count(d.c);
  const Tensor cosine = slice_channel(cost_volume_cosine(left, right, depth).values, offset);
  const Tensor lnd = slice_channel(
      cost_volume_lnd(left, right, depth, LayerNormParams::identity(d.c)).values, offset);
  const Tensor multihead = slice_channel(
      multi_head_cost_volume(left, right, CostVolumeConfig::make(depth, heads)).values, offset);

  make_dir(out_dir);
  CommandOutput out;
  json maps = json::object();
  for (const auto& [name, map] : {std::pair{"cosine", &cosine}, std::pair{"lnd", &lnd},
                                  std::pair{"multihead", &multihead}}) {
    const auto path = out_dir / (std::string(name) + ".png");
    save_png(path, minmax_rescale(*map));
    out.written.push_back(path);
    maps[name] = map_stats(*map);
  }
  const json report{{"offset", offset},
                    {"width", d.w},
                    {"height", d.h},
                    {"heads", heads},
                    {"maps", maps},
                    {"files", {"cosine.png", "lnd.png", "multihead.png"}}};
  out.report_json = report.dump(2);
  const auto report_path = out_dir / "simmap.json";
  write_text(report_path, out.report_json + "\n");
  out.written.push_back(report_path);
  return out;
}

RpeMode parse_rpe_mode(const std::string& text) {
  if (text == "off") return RpeMode::off;
  if (text == "on") return RpeMode::on;
  if (text == "both") return RpeMode::both;
  fail(ErrorCode::invalid_argument, "rpe mode must be on, off or both, got '" + text + "'");
}

CommandOutput run_demo(const DemoRequest& req, const std::filesystem::path& out_dir) {
  req.spec.validate();
  const StereoSample sample = generate_scene(req.spec);
  const CostVolumeConfig cfg = CostVolumeConfig::make(req.max_disparity, req.heads);

  std::vector<DemoReport> runs;
  if (req.mode != RpeMode::on) runs.push_back(end_to_end_demo(sample, cfg, DemoOptions{false}));
  if (req.mode != RpeMode::off) runs.push_back(end_to_end_demo(sample, cfg, DemoOptions{true}));

  json results = json::object();
  for (const auto& r : runs) {
    results[r.use_rpe ? "rpe_on" : "rpe_off"] = {{"mean_abs_error", r.mean_abs_error},
                                                 {"valid_pixels", r.valid_pixels}};
  }
  json report{{"scene", json::parse(scene_to_json(req.spec))},
              {"max_disparity", req.max_disparity},
              {"heads", req.heads},
              {"results", results}};
  if (runs.size() == 2) {
    report["rpe_gain"] = runs[0].mean_abs_error - runs[1].mean_abs_error;
    report["rpe_improves"] = runs[1].mean_abs_error < runs[0].mean_abs_error;
  }

  CommandOutput out;
  out.report_json = report.dump(2);
  if (out_dir.empty()) return out;

  make_dir(out_dir);
  const float unit = 1.0f / static_cast<float>(std::max<std::uint32_t>(req.max_disparity - 1, 1));
  for (const auto& r : runs) {
    const auto path = out_dir / (r.use_rpe ? "disparity_rpe_on.png" : "disparity_rpe_off.png");
    save_png(path, scaled(r.disparity, unit));
    out.written.push_back(path);
  }
  const auto gt_png = out_dir / "gt_disparity.png";
  save_png(gt_png, scaled(sample.gt_disparity, unit));
  out.written.push_back(gt_png);
  const auto gt_sten = out_dir / "gt_disparity.sten";
  save_sten(gt_sten, sample.gt_disparity);
  out.written.push_back(gt_sten);
  const auto gt_h = out_dir / "gt_homography.txt";
  write_text(gt_h, format_homography(sample.gt_homography) + "\n");
  out.written.push_back(gt_h);
  const auto report_path = out_dir / "demo_report.json";
  write_text(report_path, out.report_json + "\n");
  out.written.push_back(report_path);
  return out;
}

CommandOutput run_synth(const SceneSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  const StereoSample sample = generate_scene(spec);
  CommandOutput out;
  out.written = export_sample(sample, spec, out_dir);
  json files = json::array();
  for (const auto& p : out.written) files.push_back(p.filename().string());
  out.report_json = json{{"directory", out_dir.string()}, {"files", files}}.dump(2);
  return out;
}

SceneSpec scene_preset(const std::string& name) {
  if (name == "default") return default_scene();
  if (name == "misaligned") return misaligned_scene();
  if (name == "identity") return identity_scene();
  fail(ErrorCode::invalid_argument,
       "unknown scene preset '" + name + "' (valid: default, misaligned, identity)");
}

}  // namespace stereokit
