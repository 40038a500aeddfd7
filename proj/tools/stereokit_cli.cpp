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

// stereokit-cli: benchmarks, similarity maps, RPE demos, synthetic scenes and
// the property-check suite. Talks to the library through the C API only.
//
// Exit codes: 0 success, 1 input or contract error (including failed
// checks), 2 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stereokit/stereokit.h"

namespace {

using nlohmann::json;

struct StringDeleter {
  void operator()(char* s) const noexcept { sk_free_string(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

// Thrown after a failed C call; carries the process exit code.
struct CommandError {
  int exit_code;
  std::string message;
};

void check(sk_status status, const char* what) {
  if (status == SK_OK) return;
  throw CommandError{status == SK_ERR_INTERNAL ? 2 : 1,
                     std::string(what) + " failed (" + sk_status_name(status) +
                         "): " + sk_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CommandError{1, "cannot read " + path};
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw CommandError{1, "cannot write " + path};
}

// Scene flags shared by `demo` and `synth`; unset flags keep the preset value.
struct SceneFlags {
  std::string preset;
  std::string spec_file;
  std::optional<std::uint32_t> width, height, channels;
  std::optional<std::string> texture;
  std::optional<double> texture_scale, plane_depth, focal, roll, pitch, yaw;
  std::optional<std::vector<double>> translation;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd, const std::string& default_preset) {
    preset = default_preset;
    cmd->add_option("--preset", preset, "Scene preset: default, misaligned or identity")
        ->capture_default_str();
    cmd->add_option("--spec", spec_file, "JSON file with scene fields to override");
    cmd->add_option("--width", width, "Image width in pixels");
    cmd->add_option("--height", height, "Image height in pixels");
    cmd->add_option("--channels", channels, "Image channels");
    cmd->add_option("--texture", texture, "checker, value_noise or random_dots");
    cmd->add_option("--texture-scale", texture_scale, "Texture feature size in pixels");
    cmd->add_option("--plane-depth", plane_depth, "Depth of the textured plane");
    cmd->add_option("--focal", focal, "Focal length in pixels");
    cmd->add_option("--roll", roll, "Right camera roll in degrees");
    cmd->add_option("--pitch", pitch, "Right camera pitch in degrees");
    cmd->add_option("--yaw", yaw, "Right camera yaw in degrees");
    cmd->add_option("--translation", translation, "Right camera translation (3 numbers)")
        ->expected(3);
    cmd->add_option("--seed", seed, "Texture seed");
  }

  std::string to_json() const {
    char* raw = nullptr;
    check(sk_scene_spec(preset.c_str(), nullptr, &raw), "scene preset");
    json spec = json::parse(OwnedString(raw).get());
    if (!spec_file.empty()) {
      try {
        spec.merge_patch(json::parse(read_file(spec_file)));
      } catch (const json::exception& e) {
        throw CommandError{1, "invalid spec file " + spec_file + ": " + e.what()};
      }
    }
    if (width) spec["width"] = *width;
    if (height) spec["height"] = *height;
    if (channels) spec["channels"] = *channels;
    if (texture) spec["texture"] = *texture;
    if (texture_scale) spec["texture_scale"] = *texture_scale;
    if (plane_depth) spec["plane_depth"] = *plane_depth;
    if (seed) spec["seed"] = *seed;
    if (focal) spec["rig"]["focal"] = *focal;
    if (roll) spec["rig"]["roll_deg"] = *roll;
    if (pitch) spec["rig"]["pitch_deg"] = *pitch;
    if (yaw) spec["rig"]["yaw_deg"] = *yaw;
    if (translation) spec["rig"]["translation"] = *translation;
    // Round trip through the library so invalid values fail here.
    char* checked = nullptr;
    check(sk_scene_spec("default", spec.dump().c_str(), &checked), "scene spec");
    return OwnedString(checked).get();
  }
};

int cmd_simmap(const std::string& left, const std::string& right, std::uint32_t offset,
               const std::string& out) {
  char* report = nullptr;
  check(sk_cmd_simmap(left.c_str(), right.c_str(), offset, out.c_str(), &report), "simmap");
  std::cout << OwnedString(report).get() << '\n';
  return 0;
}

struct BenchFlags {
  std::string json_path = "bench.json";
  std::string csv_path = "bench.csv";
  std::uint32_t reps = 20;
  std::uint32_t warmup = 2;
  int threads = 0;
  std::uint64_t seed = 1234;
  bool no_dot_scale = false;
  std::vector<std::string> kinds;
  std::vector<std::uint32_t> disparities;
  std::optional<std::uint32_t> n, c, h, w, heads;
};

sk_cost_kind parse_kind(const std::string& name) {
  if (name == "cosine") return SK_COST_COSINE;
  if (name == "lnd") return SK_COST_LND;
  if (name == "multihead") return SK_COST_MULTIHEAD;
  throw CommandError{1, "unknown kind '" + name + "' (valid: cosine, lnd, multihead)"};
}

int cmd_bench(const BenchFlags& f) {
  if (f.threads > 0) sk_set_threads(f.threads);
  sk_bench_request req;
  sk_bench_request_init(&req);
  req.reps = f.reps;
  req.warmup = f.warmup;
  req.seed = f.seed;
  req.dot_scale = f.no_dot_scale ? 0 : 1;

  std::vector<sk_cost_kind> kinds;
  for (const auto& k : f.kinds) kinds.push_back(parse_kind(k));
  req.kinds = kinds.data();
  req.kind_count = kinds.size();

  // Any explicit shape flag switches from the default grid to one shape per --d value.
  std::vector<sk_bench_shape> shapes;
  if (f.n || f.c || f.h || f.w || f.heads || !f.disparities.empty()) {
    const sk_bench_shape base{f.n.value_or(1), f.c.value_or(32), f.h.value_or(64),
                              f.w.value_or(64), 16, f.heads.value_or(4)};
    const std::vector<std::uint32_t> ds =
        f.disparities.empty() ? std::vector<std::uint32_t>{16} : f.disparities;
    for (std::uint32_t d : ds) {
      sk_bench_shape s = base;
      s.max_disparity = d;
      shapes.push_back(s);
    }
  }
  req.shapes = shapes.data();
  req.shape_count = shapes.size();

  char* json_out = nullptr;
  char* csv_out = nullptr;
  check(sk_cmd_bench(&req, &json_out, &csv_out), "bench");
  const OwnedString js(json_out);
  const OwnedString csv(csv_out);
  write_file(f.json_path, std::string(js.get()) + "\n");
  write_file(f.csv_path, csv.get());

  for (const auto& r : json::parse(js.get())) {
    const auto& s = r["shape"];
    std::printf("%-22s C=%-3u H=%-4u W=%-4u d=%-3u heads=%-2u median %10.1f us  MACs %llu\n",
                r["operator"].get<std::string>().c_str(), s["c"].get<unsigned>(),
                s["h"].get<unsigned>(), s["w"].get<unsigned>(),
                s["max_disparity"].get<unsigned>(), s["heads"].get<unsigned>(),
                r["median_ns"].get<double>() / 1e3, r["mac_count"].get<unsigned long long>());
  }
  std::printf("wrote %s and %s\n", f.json_path.c_str(), f.csv_path.c_str());
  return 0;
}

int cmd_demo(const SceneFlags& scene, std::uint32_t d, std::uint32_t heads,
             const std::string& rpe, const std::string& out) {
  sk_rpe_mode mode;
  if (rpe == "on") {
    mode = SK_RPE_ON;
  } else if (rpe == "off") {
    mode = SK_RPE_OFF;
  } else if (rpe == "both") {
    mode = SK_RPE_BOTH;
  } else {
    throw CommandError{1, "--rpe must be on, off or both"};
  }
  char* report = nullptr;
  check(sk_cmd_demo(scene.to_json().c_str(), d, heads, mode, out.c_str(), &report), "demo");
  std::cout << OwnedString(report).get() << '\n';
  return 0;
}

int cmd_synth(const SceneFlags& scene, const std::string& out) {
  char* report = nullptr;
  check(sk_cmd_synth(scene.to_json().c_str(), out.c_str(), &report), "synth");
  std::cout << OwnedString(report).get() << '\n';
  return 0;
}

void print_progress(int /*id*/, int /*passed*/, const char* line, void* /*user*/) {
  std::cout << line << '\n' << std::flush;
}

int cmd_check(std::uint32_t bench_reps) {
  char* table = nullptr;
  int all_passed = 0;
  check(sk_cmd_check(bench_reps, print_progress, nullptr, &table, &all_passed), "check");
  const OwnedString t(table);
  const std::string text(t.get());
  // The last line of the table is the summary count.
  const auto summary = text.substr(text.rfind('\n', text.size() - 2) + 1);
  std::cout << summary;
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stereokit: cost volume and rectification-encoding toolkit"};
  app.require_subcommand(1);

  auto* simmap = app.add_subcommand("simmap", "Cosine, LND and multi-head similarity maps");
  std::string left;
  std::string right;
  std::uint32_t offset = 10;
  std::string simmap_out = "simmap_out";
  simmap->add_option("--left", left, "Left PNG image")->required();
  simmap->add_option("--right", right, "Right PNG image")->required();
  simmap->add_option("--offset", offset, "Roll offset in pixels")->capture_default_str();
  simmap->add_option("--out", simmap_out, "Output directory")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Time the cost volume operators");
  BenchFlags bf;
  bench->add_option("--json", bf.json_path, "JSON report path")->capture_default_str();
  bench->add_option("--csv", bf.csv_path, "CSV summary path")->capture_default_str();
  bench->add_option("--reps", bf.reps, "Timed repetitions")->capture_default_str();
  bench->add_option("--warmup", bf.warmup, "Untimed warmup calls")->capture_default_str();
  bench->add_option("--threads", bf.threads, "Operator threads (0: default)");
  bench->add_option("--seed", bf.seed, "Input seed")->capture_default_str();
  bench->add_flag("--no-dot-scale", bf.no_dot_scale, "Disable the multi-head dot scale");
  bench->add_option("--kinds", bf.kinds, "Subset of cosine, lnd, multihead");
  bench->add_option("--d", bf.disparities, "Max disparities (one shape each)");
  bench->add_option("--batch", bf.n, "Batch size");
  bench->add_option("--channels", bf.c, "Channels");
  bench->add_option("--height", bf.h, "Height");
  bench->add_option("--width", bf.w, "Width");
  bench->add_option("--heads", bf.heads, "Multi-head head count");

  auto* demo = app.add_subcommand("demo", "End-to-end disparity with and without RPE");
  SceneFlags demo_scene;
  demo_scene.attach(demo, "misaligned");
  std::uint32_t demo_d = 16;
  std::uint32_t demo_heads = 2;
  std::string rpe = "both";
  std::string demo_out = "demo_out";
  demo->add_option("--d", demo_d, "Max disparity")->capture_default_str();
  demo->add_option("--heads", demo_heads, "Head count")->capture_default_str();
  demo->add_option("--rpe", rpe, "on, off or both")->capture_default_str();
  demo->add_option("--out", demo_out, "Output directory")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Write a synthetic stereo sample");
  SceneFlags synth_scene;
  synth_scene.attach(synth, "default");
  std::string synth_out = "synth_out";
  synth->add_option("--out", synth_out, "Output directory")->capture_default_str();

  auto* checks = app.add_subcommand("check", "Run the property-check suite");
  std::uint32_t bench_reps = 25;
  checks->add_option("--bench-reps", bench_reps, "Repetitions for the latency check")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*simmap) return cmd_simmap(left, right, offset, simmap_out);
    if (*bench) return cmd_bench(bf);
    if (*demo) return cmd_demo(demo_scene, demo_d, demo_heads, rpe, demo_out);
    if (*synth) return cmd_synth(synth_scene, synth_out);
    if (*checks) return cmd_check(bench_reps);
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
