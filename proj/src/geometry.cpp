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

#include "pedsynth/geometry.hpp"

#include <algorithm>
#include <string>

namespace pedsynth {

PixelBox::PixelBox(int x1, int y1, int x2, int y2)
    : x1(x1), y1(y1), x2(x2), y2(y2) {
  if (x1 < 0 || y1 < 0) {
    throw ValidationError("PixelBox coordinates must be non-negative, got (" +
                          std::to_string(x1) + "," + std::to_string(y1) + ")");
  }
  if (x2 <= x1 || y2 <= y1) {
    throw ValidationError("PixelBox must have positive extent, got (" +
                          std::to_string(x1) + "," + std::to_string(y1) + "," +
                          std::to_string(x2) + "," + std::to_string(y2) + ")");
  }
}

std::int64_t box_area(const PixelBox& b) { return b.area(); }

std::optional<PixelBox> intersect(const PixelBox& a, const PixelBox& b) {
  const int x1 = std::max(a.x1, b.x1);
  const int y1 = std::max(a.y1, b.y1);
  const int x2 = std::min(a.x2, b.x2);
  const int y2 = std::min(a.y2, b.y2);
  if (x2 <= x1 || y2 <= y1) {
    return std::nullopt;
  }
  return PixelBox(x1, y1, x2, y2);
}

double iou(const PixelBox& a, const PixelBox& b) {
  const auto inter = intersect(a, b);
  if (!inter) {
    return 0.0;
  }
  const std::int64_t inter_area = inter->area();
  const std::int64_t union_area = a.area() + b.area() - inter_area;
  return static_cast<double>(inter_area) / static_cast<double>(union_area);
}

double occlusion_rate(std::int64_t visible_pixels, std::int64_t full_pixels) {
  if (full_pixels <= 0) {
    throw ValidationError("occlusion_rate: degenerate mask, full_pixels = " +
                          std::to_string(full_pixels));
  }
  if (visible_pixels < 0 || visible_pixels > full_pixels) {
    throw ValidationError(
        "occlusion_rate: visible_pixels must lie in [0, full_pixels], got " +
        std::to_string(visible_pixels) + " / " + std::to_string(full_pixels));
  }
  return 1.0 -
         static_cast<double>(visible_pixels) / static_cast<double>(full_pixels);
}

OcclusionBucket::OcclusionBucket(int index) : index(index) {
  if (index < 0 || index > 9) {
    throw ValidationError("OcclusionBucket index must be in [0,9], got " +
                          std::to_string(index));
  }
}

std::optional<OcclusionBucket> bucket_of(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw ValidationError("bucket_of: rate must be in [0,1], got " +
                          std::to_string(rate));
  }
  if (rate > 0.99) {
    return std::nullopt;  // outside the taxonomy; caller retries
  }
  // Largest k with rate >= k/10. Comparing against the k/10 doubles directly
  // keeps the exact decile boundaries in their own buckets.
  for (int k = 9; k > 0; --k) {
    if (rate >= static_cast<double>(k) / 10.0) {
      return OcclusionBucket(k);
    }
  }
  return OcclusionBucket(0);
}

}  // namespace pedsynth
