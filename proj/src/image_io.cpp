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

#include "stereokit/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

#include "stereokit/error.hpp"

namespace stereokit {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Tensor load_png(const std::filesystem::path& path) {
  File fp(std::fopen(path.c_str(), "rb"));
  require(fp != nullptr, ErrorCode::io, "cannot open image " + path.string());
  png_byte header[8];
  require(std::fread(header, 1, 8, fp.get()) == 8 && png_sig_cmp(header, 0, 8) == 0,
          ErrorCode::io, path.string() + " is not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorCode::internal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::internal, "png_create_info_struct failed");
  }
  std::vector<png_byte> pixels;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::io, "corrupt PNG data in " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Tensor out(Dims{1, 3, height, width});
  for (png_uint_32 y = 0; y < height; ++y)
    for (png_uint_32 x = 0; x < width; ++x)
      for (std::uint32_t c = 0; c < 3; ++c) {
        out.at(0, c, y, x) = rows[y][3 * x + c] / 255.0f;
      }
  return out;
}

void save_png(const std::filesystem::path& path, const Tensor& image) {
  const Dims& d = image.dims();
  require(d.n == 1, ErrorCode::shape_mismatch, "save_png expects a single image (N = 1)");
  const int channels = d.c >= 3 ? 3 : 1;
  File fp(std::fopen(path.c_str(), "wb"));
  require(fp != nullptr, ErrorCode::io, "cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorCode::internal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::internal, "png_create_info_struct failed");
  }
  std::vector<png_byte> pixels(std::size_t{d.h} * d.w * channels);
  for (std::uint32_t y = 0; y < d.h; ++y)
    for (std::uint32_t x = 0; x < d.w; ++x)
      for (int c = 0; c < channels; ++c) {
        const float v = std::clamp(image.at(0, c, y, x), 0.0f, 1.0f);
        pixels[(std::size_t{y} * d.w + x) * channels + c] =
            static_cast<png_byte>(std::lround(v * 255.0f));
      }
  std::vector<png_bytep> rows(d.h);
  for (std::uint32_t y = 0; y < d.h; ++y) rows[y] = pixels.data() + std::size_t{y} * d.w * channels;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::io, "failed writing PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, d.w, d.h, 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Tensor minmax_rescale(const Tensor& map) {
  const Dims& d = map.dims();
  Tensor out(Dims{1, 1, d.h, d.w});
  const auto src = map.data().subspan(0, d.plane());
  const auto [lo, hi] = std::minmax_element(src.begin(), src.end());
  const float range = *hi - *lo;
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = range > 0.0f ? (src[i] - *lo) / range : std::clamp(src[i], 0.0f, 1.0f);
  }
  return out;
}

}  // namespace stereokit
