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

// Command implementations shared by the C API and the command-line tool.
// Each validates every input before writing anything, so a failed command
// leaves no partial artifacts behind.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stereokit/synth.hpp"

namespace stereokit {

struct CommandOutput {
  std::string report_json;
  std::vector<std::filesystem::path> written;
};

/// Cosine, LND and multi-head similarity of two equally sized PNG images at
/// one roll offset. Writes cosine.png, lnd.png, multihead.png (min-max
/// rescaled) and simmap.json with the raw per-map min, max and mean.
CommandOutput run_simmap(const std::filesystem::path& left_png,
                         const std::filesystem::path& right_png, std::uint32_t offset,
                         const std::filesystem::path& out_dir);

enum class RpeMode { off, on, both };

RpeMode parse_rpe_mode(const std::string& text);

struct DemoRequest {
  SceneSpec spec = misaligned_scene();
  std::uint32_t max_disparity = 16;
  std::uint32_t heads = 2;
  RpeMode mode = RpeMode::both;
};

/// Runs the end-to-end demo and, when `out_dir` is non-empty, writes
/// disparity PNGs scaled by 1/(max_disparity - 1), the ground truth and
/// demo_report.json. The report carries no timing or date fields.
CommandOutput run_demo(const DemoRequest& req, const std::filesystem::path& out_dir);

/// generate_scene + export_sample.
CommandOutput run_synth(const SceneSpec& spec, const std::filesystem::path& out_dir);

/// Scene presets by name: default, misaligned, identity.
SceneSpec scene_preset(const std::string& name);

}  // namespace stereokit
