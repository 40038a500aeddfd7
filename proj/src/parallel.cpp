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

#include "stereokit/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace stereokit {
namespace {

int default_threads() noexcept {
  if (const char* env = std::getenv("STEREO_KIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& override_slot() noexcept {
  static std::atomic<int> slot{0};
  return slot;
}

}  // namespace

int thread_count() noexcept {
  const int forced = override_slot().load(std::memory_order_relaxed);
  if (forced >= 1) return forced;
  static const int cached = default_threads();
  return cached;
}

void set_thread_count(int threads) noexcept {
  override_slot().store(threads >= 1 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace stereokit
