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

#include <cstdint>
#include <optional>
#include <vector>

#include "pedsynth/errors.hpp"
#include "pedsynth/geometry.hpp"

namespace pedsynth {

// Row-major binary grid with a cached population count.
class BinaryMask {
 public:
  BinaryMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }

  void set(int x, int y, bool value = true) {
    auto& cell = bits_[index(x, y)];
    population_ += static_cast<std::int64_t>(value) - cell;
    cell = value ? 1 : 0;
  }

  std::int64_t population() const { return population_; }
  bool empty() const { return population_ == 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::int64_t population_ = 0;
  std::vector<std::uint8_t> bits_;
};

// 8-bit RGB image, row-major, 3 bytes per pixel.
class RasterImage {
 public:
  RasterImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  std::uint8_t* pixel(int x, int y) { return data_.data() + offset(x, y); }
  const std::uint8_t* pixel(int x, int y) const {
    return data_.data() + offset(x, y);
  }

  void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) {
    auto* p = pixel(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }

  std::vector<std::uint8_t>& data() { return data_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

// Square structuring element; side must be odd so the anchor is centered.
struct StructuringElement {
  int side;

  explicit StructuringElement(int side = 3);
};

// Morphology. Pixels outside the mask count as unset, so erosion clears a
// border of (side-1)/2 even on an all-set mask.
BinaryMask erode(const BinaryMask& m, StructuringElement element);
BinaryMask dilate(const BinaryMask& m, StructuringElement element);
// OPEN: erosion followed by dilation with the same element.
BinaryMask opening(const BinaryMask& m, StructuringElement element);

// Set algebra on same-sized masks.
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);

// Shifts a mask by (dx, dy) into an out_width x out_height grid, dropping
// bits that land out of bounds.
BinaryMask translate(const BinaryMask& m, int dx, int dy, int out_width,
                     int out_height);

// Minimal box containing all set bits; nullopt for an empty mask.
std::optional<PixelBox> tight_box(const BinaryMask& m);

// Copies the half-open window [x1,x2) x [y1,y2), which must lie inside the
// source.
RasterImage crop(const RasterImage& img, const PixelBox& box);
BinaryMask crop(const BinaryMask& m, const PixelBox& box);

struct MaskedImage {
  RasterImage pixels;
  BinaryMask mask;
};

// Nearest-neighbor resample of an image and its mask to (new_w, new_h).
// Source coordinates come from sx = floor((2x+1)*src_w / (2*new_w)) in exact
// integer arithmetic. A nonempty mask stays nonempty: if resampling drops
// every bit, the bit the centroid maps to is set.
MaskedImage resize_nearest(const RasterImage& pixels, const BinaryMask& mask,
                           int new_w, int new_h);

// Binary-alpha composite: every background pixel under a set bit of
// `visible` (translated by `offset`) is replaced by the foreground pixel,
// everything else is left untouched. `visible` is in foreground coordinates
// and must match the foreground dimensions. Throws PlacementError when no
// set bit lands inside the background.
RasterImage fuse(const RasterImage& bg, const RasterImage& fg,
                 const BinaryMask& visible, PixelPoint offset);

}  // namespace pedsynth
