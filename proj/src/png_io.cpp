// Copyright 2026 The pedsynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pedsynth/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

namespace pedsynth {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) {
      std::fclose(f);
    }
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return f;
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngReader() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
    if (png) {
      info = png_create_info_struct(png);
    }
    if (!png || !info) {
      png_destroy_read_struct(&png, &info, nullptr);
      throw IoError("libpng: failed to allocate read structures");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                  nullptr);
    if (png) {
      info = png_create_info_struct(png);
    }
    if (!png || !info) {
      png_destroy_write_struct(&png, &info);
      throw IoError("libpng: failed to allocate write structures");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
};

}  // namespace

DecodedPng read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  PngReader reader;

  // libpng reports errors via longjmp; everything it may interrupt lives
  // in plain buffers allocated before the jump target.
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  bool has_alpha = false;
  bool grayscale = false;

  if (setjmp(png_jmpbuf(reader.png))) {
    throw IoError("libpng: failed to decode '" + path.string() + "'");
  }

  png_init_io(reader.png, file.get());
  png_read_info(reader.png, reader.info);

  width = png_get_image_width(reader.png, reader.info);
  height = png_get_image_height(reader.png, reader.info);
  const int color_type = png_get_color_type(reader.png, reader.info);
  const int bit_depth = png_get_bit_depth(reader.png, reader.info);

  grayscale = (color_type == PNG_COLOR_TYPE_GRAY ||
               color_type == PNG_COLOR_TYPE_GRAY_ALPHA);
  has_alpha = (color_type & PNG_COLOR_MASK_ALPHA) != 0 ||
              png_get_valid(reader.png, reader.info, PNG_INFO_tRNS) != 0;

  if (bit_depth == 16) {
    png_set_strip_16(reader.png);
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(reader.png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(reader.png);
  }
  if (png_get_valid(reader.png, reader.info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(reader.png);
  }
  if (grayscale) {
    png_set_gray_to_rgb(reader.png);
  }
  if (!has_alpha) {
    png_set_filler(reader.png, 0xFF, PNG_FILLER_AFTER);
  }
  png_read_update_info(reader.png, reader.info);

  if (width == 0 || height == 0) {
    throw IoError("PNG has zero dimension: '" + path.string() + "'");
  }

  pixels.resize(static_cast<std::size_t>(width) * height * 4);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * 4;
  }
  png_read_image(reader.png, rows.data());
  png_read_end(reader.png, nullptr);

  DecodedPng out{RasterImage(static_cast<int>(width), static_cast<int>(height)),
                 std::nullopt, grayscale};
  if (has_alpha) {
    out.alpha_mask = BinaryMask(static_cast<int>(width),
                                static_cast<int>(height));
  }
  for (png_uint_32 y = 0; y < height; ++y) {
    for (png_uint_32 x = 0; x < width; ++x) {
      const auto* src = pixels.data() + (static_cast<std::size_t>(y) * width +
                                         x) * 4;
      out.rgb.set_pixel(static_cast<int>(x), static_cast<int>(y), src[0],
                        src[1], src[2]);
      if (has_alpha && src[3] >= 128) {
        out.alpha_mask->set(static_cast<int>(x), static_cast<int>(y));
      }
    }
  }
  return out;
}

RasterImage read_image_rgb(const std::filesystem::path& path) {
  return read_png(path).rgb;
}

BinaryMask read_mask(const std::filesystem::path& path) {
  DecodedPng decoded = read_png(path);
  if (decoded.alpha_mask) {
    return std::move(*decoded.alpha_mask);
  }
  if (!decoded.grayscale) {
    // The file read fine; its format is a corpus configuration mistake.
    throw ValidationError("mask '" + path.string() +
                          "' must be an alpha-bearing or single-channel PNG");
  }
  BinaryMask mask(decoded.rgb.width(), decoded.rgb.height());
  for (int y = 0; y < decoded.rgb.height(); ++y) {
    for (int x = 0; x < decoded.rgb.width(); ++x) {
      if (decoded.rgb.pixel(x, y)[0] >= 128) {
        mask.set(x, y);
      }
    }
  }
  return mask;
}

namespace {

void write_png_impl(const std::filesystem::path& path, int width, int height,
                    int color_type, const std::vector<std::uint8_t>& bytes,
                    std::size_t stride) {
  FilePtr file = open_file(path, "wb");
  PngWriter writer;

  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(bytes.data() + y * stride);
  }

  if (setjmp(png_jmpbuf(writer.png))) {
    throw IoError("libpng: failed to encode '" + path.string() + "'");
  }

  png_init_io(writer.png, file.get());
  // Fixed settings keep reruns byte-identical.
  png_set_compression_level(writer.png, 6);
  png_set_IHDR(writer.png, writer.info, width, height, 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png, writer.info);
  png_write_image(writer.png, rows.data());
  png_write_end(writer.png, nullptr);
}

}  // namespace

void write_image_rgb(const std::filesystem::path& path,
                     const RasterImage& img) {
  write_png_impl(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB,
                 img.data(), static_cast<std::size_t>(img.width()) * 3);
}

void write_image_rgba(const std::filesystem::path& path, const RasterImage& img,
                      const BinaryMask& alpha) {
  if (img.width() != alpha.width() || img.height() != alpha.height()) {
    throw ValidationError("write_image_rgba: image and mask dimensions differ");
  }
  std::vector<std::uint8_t> bytes(
      static_cast<std::size_t>(img.width()) * img.height() * 4);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto* sp = img.pixel(x, y);
      auto* dst = bytes.data() +
                  (static_cast<std::size_t>(y) * img.width() + x) * 4;
      dst[0] = sp[0];
      dst[1] = sp[1];
      dst[2] = sp[2];
      dst[3] = alpha.test(x, y) ? 255 : 0;
    }
  }
  write_png_impl(path, img.width(), img.height(), PNG_COLOR_TYPE_RGBA, bytes,
                 static_cast<std::size_t>(img.width()) * 4);
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> bytes(
      static_cast<std::size_t>(mask.width()) * mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bytes[static_cast<std::size_t>(y) * mask.width() + x] =
          mask.test(x, y) ? 255 : 0;
    }
  }
  write_png_impl(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, bytes,
                 static_cast<std::size_t>(mask.width()));
}

}  // namespace pedsynth
