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
#include <string>
#include <vector>

#include "stereokit/costvol.hpp"

namespace stereokit {

struct BenchShape {
  std::uint32_t n = 1;
  std::uint32_t c = 32;
  std::uint32_t h = 64;
  std::uint32_t w = 64;
  std::uint32_t max_disparity = 16;
  std::uint32_t heads = 4;
};

struct BenchSettings {
  std::uint32_t reps = 20;
  std::uint32_t warmup = 2;
  bool dot_scale = true;
  float epsilon = 1e-5f;
  std::uint64_t seed = 1234;
};

struct BenchReport {
  std::string op;
  BenchShape shape;
  std::uint32_t reps = 0;
  std::uint32_t warmup = 0;
  std::vector<std::int64_t> samples_ns;
  double median_ns = 0.0;
  double mean_ns = 0.0;
  double min_ns = 0.0;
  std::uint64_t mac_count = 0;
  int threads = 1;
  std::string timestamp;  // UTC, ISO 8601
};

/// Times one operator on seeded random inputs shared by every kind. Outputs
/// and scratch buffers are allocated before the timed region.
BenchReport bench_operator(CostKind kind, const BenchShape& shape, const BenchSettings& settings);

/// One report per (shape, kind) in grid order.
std::vector<BenchReport> bench_sweep(const std::vector<BenchShape>& grid,
                                     const std::vector<CostKind>& kinds,
                                     const BenchSettings& settings);

/// Shapes used when no grid is given.
std::vector<BenchShape> default_bench_grid();

/// JSON array, snake_case BenchReport fields.
std::string bench_to_json(const std::vector<BenchReport>& reports);
/// Header plus one row per report (samples omitted).
std::string bench_to_csv(const std::vector<BenchReport>& reports);

}  // namespace stereokit
