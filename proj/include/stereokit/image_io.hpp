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

#include <filesystem>

#include "stereokit/tensor.hpp"

namespace stereokit {

/// Reads an 8-bit PNG as a [1, 3, H, W] tensor in [0, 1]. Grey and palette
/// images are expanded to RGB; alpha is dropped.
Tensor load_png(const std::filesystem::path& path);

/// Writes a [1, C, H, W] tensor with values in [0, 1] as 8-bit PNG: grey for
/// C = 1 or 2, RGB from the first three channels otherwise.
void save_png(const std::filesystem::path& path, const Tensor& image);

/// Min-max rescales channel 0 of a [1, C, H, W] tensor to [0, 1]; a constant
/// map is clamped into [0, 1] instead.
Tensor minmax_rescale(const Tensor& map);

}  // namespace stereokit
