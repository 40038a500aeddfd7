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

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace stereokit {

/// Number of worker threads operators may use. Initialised from the
/// STEREO_KIT_THREADS environment variable, falling back to the hardware
/// concurrency. Always at least 1.
int thread_count() noexcept;

/// Overrides the operator thread cap; values < 1 reset to the default.
void set_thread_count(int threads) noexcept;

/// Runs fn(begin, end) over a static partition of [0, count). Each index is
/// handled by exactly one invocation, so per-index results do not depend on
/// the thread count. Small ranges run inline.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t min_per_thread, Fn&& fn) {
  if (count == 0) return;
  std::size_t threads = static_cast<std::size_t>(thread_count());
  threads = std::min(threads, (count + min_per_thread - 1) / std::max<std::size_t>(min_per_thread, 1));
  if (threads <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 1; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(count, chunk));
}

}  // namespace stereokit
