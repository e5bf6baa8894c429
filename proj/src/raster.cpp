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

#include "pedsynth/raster.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace pedsynth {

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("BinaryMask dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

RasterImage::RasterImage(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("RasterImage dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  data_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

StructuringElement::StructuringElement(int side) : side(side) {
  if (side < 1 || side % 2 == 0) {
    throw ValidationError("StructuringElement side must be odd and >= 1, got " +
                          std::to_string(side));
  }
}

namespace {

void require_fits(const BinaryMask& m, StructuringElement element) {
  if (element.side > std::min(m.width(), m.height())) {
    throw ValidationError("structuring element side " +
                          std::to_string(element.side) +
                          " exceeds mask dimensions " +
                          std::to_string(m.width()) + "x" +
                          std::to_string(m.height()));
  }
}

void require_same_dims(const BinaryMask& a, const BinaryMask& b,
                       const char* op) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ValidationError(std::string(op) + ": mask dimensions differ (" +
                          std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " +
                          std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + ")");
  }
}

}  // namespace

BinaryMask erode(const BinaryMask& m, StructuringElement element) {
  require_fits(m, element);
  const int r = element.side / 2;
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.test(x, y)) {
        continue;
      }
      bool all_set = true;
      for (int dy = -r; dy <= r && all_set; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= m.height()) {
          all_set = false;
          break;
        }
        for (int dx = -r; dx <= r; ++dx) {
          const int nx = x + dx;
          if (nx < 0 || nx >= m.width() || !m.test(nx, ny)) {
            all_set = false;
            break;
          }
        }
      }
      if (all_set) {
        out.set(x, y);
      }
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& m, StructuringElement element) {
  require_fits(m, element);
  const int r = element.side / 2;
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool any_set = false;
      for (int dy = -r; dy <= r && !any_set; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= m.height()) {
          continue;
        }
        for (int dx = -r; dx <= r; ++dx) {
          const int nx = x + dx;
          if (nx >= 0 && nx < m.width() && m.test(nx, ny)) {
            any_set = true;
            break;
          }
        }
      }
      if (any_set) {
        out.set(x, y);
      }
    }
  }
  return out;
}

BinaryMask opening(const BinaryMask& m, StructuringElement element) {
  return dilate(erode(m, element), element);
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b, "mask_and");
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a.test(x, y) && b.test(x, y)) {
        out.set(x, y);
      }
    }
  }
  return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b, "mask_or");
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a.test(x, y) || b.test(x, y)) {
        out.set(x, y);
      }
    }
  }
  return out;
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  require_same_dims(a, b, "mask_and_not");
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a.test(x, y) && !b.test(x, y)) {
        out.set(x, y);
      }
    }
  }
  return out;
}

BinaryMask translate(const BinaryMask& m, int dx, int dy, int out_width,
                     int out_height) {
  BinaryMask out(out_width, out_height);
  for (int y = 0; y < m.height(); ++y) {
    const int ty = y + dy;
    if (ty < 0 || ty >= out_height) {
      continue;
    }
    for (int x = 0; x < m.width(); ++x) {
      const int tx = x + dx;
      if (tx >= 0 && tx < out_width && m.test(x, y)) {
        out.set(tx, ty);
      }
    }
  }
  return out;
}

std::optional<PixelBox> tight_box(const BinaryMask& m) {
  int min_x = m.width();
  int min_y = m.height();
  int max_x = -1;
  int max_y = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.test(x, y)) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
    }
  }
  if (max_x < 0) {
    return std::nullopt;
  }
  return PixelBox(min_x, min_y, max_x + 1, max_y + 1);
}

namespace {

void require_window(int w, int h, const PixelBox& box, const char* what) {
  if (box.x1 < 0 || box.y1 < 0 || box.x2 > w || box.y2 > h) {
    throw ValidationError(std::string(what) + ": window outside source");
  }
}

}  // namespace

RasterImage crop(const RasterImage& img, const PixelBox& box) {
  require_window(img.width(), img.height(), box, "crop");
  RasterImage out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      const auto* sp = img.pixel(box.x1 + x, box.y1 + y);
      out.set_pixel(x, y, sp[0], sp[1], sp[2]);
    }
  }
  return out;
}

BinaryMask crop(const BinaryMask& m, const PixelBox& box) {
  require_window(m.width(), m.height(), box, "crop");
  BinaryMask out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      if (m.test(box.x1 + x, box.y1 + y)) {
        out.set(x, y);
      }
    }
  }
  return out;
}

MaskedImage resize_nearest(const RasterImage& pixels, const BinaryMask& mask,
                           int new_w, int new_h) {
  if (pixels.width() != mask.width() || pixels.height() != mask.height()) {
    throw ValidationError("resize_nearest: image and mask dimensions differ");
  }
  if (new_w < 1 || new_h < 1) {
    throw ValidationError("resize_nearest: target dimensions must be >= 1");
  }
  const std::int64_t src_w = pixels.width();
  const std::int64_t src_h = pixels.height();

  RasterImage out_pixels(new_w, new_h);
  BinaryMask out_mask(new_w, new_h);
  std::vector<int> col_src(new_w);
  for (int x = 0; x < new_w; ++x) {
    col_src[x] = static_cast<int>((2 * static_cast<std::int64_t>(x) + 1) *
                                  src_w / (2 * new_w));
  }
  for (int y = 0; y < new_h; ++y) {
    const int sy = static_cast<int>((2 * static_cast<std::int64_t>(y) + 1) *
                                    src_h / (2 * new_h));
    for (int x = 0; x < new_w; ++x) {
      const int sx = col_src[x];
      const auto* sp = pixels.pixel(sx, sy);
      out_pixels.set_pixel(x, y, sp[0], sp[1], sp[2]);
      if (mask.test(sx, sy)) {
        out_mask.set(x, y);
      }
    }
  }

  // A nonempty mask must survive the resample; fall back to the centroid bit.
  if (out_mask.empty() && !mask.empty()) {
    std::int64_t sum_x = 0;
    std::int64_t sum_y = 0;
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (mask.test(x, y)) {
          sum_x += x;
          sum_y += y;
        }
      }
    }
    const std::int64_t pop = mask.population();
    const int cx = static_cast<int>(sum_x / pop);
    const int cy = static_cast<int>(sum_y / pop);
    const int ox = std::clamp(static_cast<int>(cx * static_cast<std::int64_t>(
                                                        new_w) /
                                               src_w),
                              0, new_w - 1);
    const int oy = std::clamp(static_cast<int>(cy * static_cast<std::int64_t>(
                                                        new_h) /
                                               src_h),
                              0, new_h - 1);
    out_mask.set(ox, oy);
  }
  return MaskedImage{std::move(out_pixels), std::move(out_mask)};
}

RasterImage fuse(const RasterImage& bg, const RasterImage& fg,
                 const BinaryMask& visible, PixelPoint offset) {
  if (fg.width() != visible.width() || fg.height() != visible.height()) {
    throw ValidationError("fuse: foreground and mask dimensions differ");
  }
  RasterImage out = bg;
  std::int64_t written = 0;
  for (int y = 0; y < visible.height(); ++y) {
    const int ty = y + offset.y;
    if (ty < 0 || ty >= bg.height()) {
      continue;
    }
    for (int x = 0; x < visible.width(); ++x) {
      const int tx = x + offset.x;
      if (tx < 0 || tx >= bg.width() || !visible.test(x, y)) {
        continue;
      }
      const auto* sp = fg.pixel(x, y);
      out.set_pixel(tx, ty, sp[0], sp[1], sp[2]);
      ++written;
    }
  }
  if (written == 0) {
    throw PlacementError("fuse: clipped footprint is empty");
  }
  return out;
}

}  // namespace pedsynth
