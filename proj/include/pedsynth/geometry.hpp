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

#include "pedsynth/errors.hpp"

namespace pedsynth {

// Integer point in image coordinates, origin top-left, x right, y down.
struct PixelPoint {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

// Axis-aligned box in pixel coordinates. x2/y2 are exclusive, so
// area = (x2-x1)*(y2-y1) and two boxes sharing only an edge do not overlap.
struct PixelBox {
  int x1;
  int y1;
  int x2;
  int y2;

  PixelBox(int x1, int y1, int x2, int y2);

  int width() const { return x2 - x1; }
  int height() const { return y2 - y1; }
  std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * height();
  }
  bool contains(int px, int py) const {
    return px >= x1 && px < x2 && py >= y1 && py < y2;
  }

  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

std::int64_t box_area(const PixelBox& b);

// Maximal box contained in both, or nullopt when the overlap has zero area.
std::optional<PixelBox> intersect(const PixelBox& a, const PixelBox& b);

// area(a n b) / area(a u b); 0 for disjoint boxes, exactly 1 for a == b.
double iou(const PixelBox& a, const PixelBox& b);

// Fraction of a mask hidden by occluders: 1 - visible/full.
// Throws ValidationError when full_pixels == 0 or visible > full.
double occlusion_rate(std::int64_t visible_pixels, std::int64_t full_pixels);

// One of the ten occlusion classes: bucket k covers rates in
// [k*10%, (k+1)*10%), bucket 0 is "not occluded", bucket 9 tops out at 99%.
struct OcclusionBucket {
  int index;

  explicit OcclusionBucket(int index);

  int lower_bound_percent() const { return 10 * index; }

  friend bool operator==(const OcclusionBucket&, const OcclusionBucket&) =
      default;
};

// Classifies a rate in [0,1] into its decile bucket. Returns nullopt for
// rates above 0.99: such instances fall outside the taxonomy and must be
// rejected (the caller retries with a new sample). Throws ValidationError
// for rates outside [0,1].
std::optional<OcclusionBucket> bucket_of(double rate);

}  // namespace pedsynth
