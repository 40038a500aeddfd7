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

#include "stereokit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "stereokit/error.hpp"
#include "stereokit/parallel.hpp"
#include "stereokit/random.hpp"

namespace stereokit {
namespace {

Tensor random_tensor(const Dims& d, Sampler& rng) {
  Tensor t(d);
  for (float& v : t.data()) v = static_cast<float>(rng.normal());
  return t;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void summarise(BenchReport& r) {
  std::vector<std::int64_t> sorted = r.samples_ns;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  r.min_ns = static_cast<double>(sorted.front());
  r.median_ns = n % 2 ? static_cast<double>(sorted[n / 2])
                      : 0.5 * (static_cast<double>(sorted[n / 2 - 1]) + sorted[n / 2]);
  r.mean_ns = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
}

}  // namespace

BenchReport bench_operator(CostKind kind, const BenchShape& shape, const BenchSettings& settings) {
  require(settings.reps >= 3, ErrorCode::invalid_argument, "bench needs reps >= 3");
  require(settings.warmup >= 1, ErrorCode::invalid_argument, "bench needs warmup >= 1");
  const Dims dims{shape.n, shape.c, shape.h, shape.w};
  validate_dims(dims);

  // Same seed for every kind, so all operators see identical inputs.
  Sampler rng(settings.seed);
  const Tensor left = random_tensor(dims, rng);
  const Tensor right = random_tensor(dims, rng);

  const std::uint32_t heads = kind == CostKind::multihead ? shape.heads : 1;
  CostVolumeConfig cfg = CostVolumeConfig::make(shape.max_disparity, heads,
                                                kind == CostKind::multihead && settings.dot_scale,
                                                settings.epsilon);
  if (kind == CostKind::lnd) cfg.pointwise = GroupConvWeights::uniform(shape.max_disparity, 1, 1, 1.0f);
  cfg.validate(dims);

  CostVolume out;
  MultiHeadWorkspace ws;
  auto run = [&] {
    if (kind == CostKind::cosine) {
      cost_volume_cosine_into(left, right, shape.max_disparity, out);
    } else {
      multi_head_cost_volume_into(left, right, cfg, std::nullopt, ws, out);
    }
  };

  BenchReport r;
  r.op = std::string("cost_volume_") + to_string(kind);
  r.shape = shape;
  r.shape.heads = heads;
  r.reps = settings.reps;
  r.warmup = settings.warmup;
  r.threads = thread_count();
  r.mac_count = mac_count(kind, shape.c, shape.h, shape.w, shape.max_disparity, heads).multiply_accumulates;
  r.timestamp = utc_timestamp();
  r.samples_ns.reserve(settings.reps);

  for (std::uint32_t i = 0; i < settings.warmup; ++i) run();
  for (std::uint32_t i = 0; i < settings.reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    run();
    const auto stop = std::chrono::steady_clock::now();
    r.samples_ns.push_back(
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
  }
  summarise(r);
  return r;
}

std::vector<BenchReport> bench_sweep(const std::vector<BenchShape>& grid,
                                     const std::vector<CostKind>& kinds,
                                     const BenchSettings& settings) {
  require(!grid.empty(), ErrorCode::invalid_argument, "bench sweep grid is empty");
  require(!kinds.empty(), ErrorCode::invalid_argument, "bench sweep needs at least one kind");
  std::vector<BenchReport> reports;
  reports.reserve(grid.size() * kinds.size());
  for (const auto& shape : grid)
    for (CostKind kind : kinds) reports.push_back(bench_operator(kind, shape, settings));
  return reports;
}

std::vector<BenchShape> default_bench_grid() {
  return {BenchShape{1, 32, 64, 64, 16, 4}, BenchShape{1, 32, 32, 32, 8, 4},
          BenchShape{1, 16, 48, 48, 4, 2}};
}

std::string bench_to_json(const std::vector<BenchReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"operator", r.op},
                   {"shape", {{"n", r.shape.n}, {"c", r.shape.c}, {"h", r.shape.h},
                              {"w", r.shape.w}, {"max_disparity", r.shape.max_disparity},
                              {"heads", r.shape.heads}}},
                   {"repetitions", r.reps},
                   {"warmup", r.warmup},
                   {"samples_ns", r.samples_ns},
                   {"median_ns", r.median_ns},
                   {"mean_ns", r.mean_ns},
                   {"min_ns", r.min_ns},
                   {"mac_count", r.mac_count},
                   {"thread_count", r.threads},
                   {"timestamp", r.timestamp}});
  }
  return arr.dump(2);
}

std::string bench_to_csv(const std::vector<BenchReport>& reports) {
  std::ostringstream os;
  os << "operator,n,c,h,w,max_disparity,heads,repetitions,warmup,median_ns,mean_ns,min_ns,"
        "mac_count,thread_count,timestamp\n";
  for (const auto& r : reports) {
    os << r.op << ',' << r.shape.n << ',' << r.shape.c << ',' << r.shape.h << ',' << r.shape.w
       << ',' << r.shape.max_disparity << ',' << r.shape.heads << ',' << r.reps << ','
       << r.warmup << ',' << r.median_ns << ',' << r.mean_ns << ',' << r.min_ns << ','
       << r.mac_count << ',' << r.threads << ',' << r.timestamp << '\n';
  }
  return os.str();
}

}  // namespace stereokit
