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

#pragma once

#include <filesystem>
#include <optional>

#include "pedsynth/raster.hpp"

namespace pedsynth {

struct DecodedPng {
  RasterImage rgb;
  // Present when the source carried an alpha channel (RGBA or gray+alpha);
  // a bit is set where alpha >= 128.
  std::optional<BinaryMask> alpha_mask;
  bool grayscale = false;
};

DecodedPng read_png(const std::filesystem::path& path);

RasterImage read_image_rgb(const std::filesystem::path& path);

// Mask files are either alpha-bearing PNGs (alpha >= 128 -> set) or
// single-channel grayscale PNGs (value >= 128 -> set). Plain RGB is refused.
BinaryMask read_mask(const std::filesystem::path& path);

void write_image_rgb(const std::filesystem::path& path, const RasterImage& img);
void write_image_rgba(const std::filesystem::path& path, const RasterImage& img,
                      const BinaryMask& alpha);
// Grayscale 0/255 encoding of a mask.
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace pedsynth
