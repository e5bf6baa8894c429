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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <random>

#include "pedsynth/png_io.hpp"
#include "pedsynth/raster.hpp"
#include "test_support.hpp"

using namespace pedsynth;
using pedsynth::testing::TempDir;
using pedsynth::testing::full_mask;
using pedsynth::testing::pattern_image;
using pedsynth::testing::rect_mask;

namespace {

// Literal transcriptions of the morphology definitions, kept independent of
// the library code so the two can cross-check each other.
BinaryMask erode_oracle(const BinaryMask& m, int side) {
  const int r = side / 2;
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool keep = true;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          const bool inside =
              nx >= 0 && nx < m.width() && ny >= 0 && ny < m.height();
          if (!inside || !m.test(nx, ny)) {
            keep = false;
          }
        }
      }
      if (keep) {
        out.set(x, y);
      }
    }
  }
  return out;
}

BinaryMask dilate_oracle(const BinaryMask& m, int side) {
  const int r = side / 2;
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx >= 0 && nx < m.width() && ny >= 0 && ny < m.height() &&
              m.test(nx, ny)) {
            out.set(x, y);
          }
        }
      }
    }
  }
  return out;
}

BinaryMask random_mask(int w, int h, double density, std::mt19937& gen) {
  std::bernoulli_distribution bit(density);
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (bit(gen)) {
        m.set(x, y);
      }
    }
  }
  return m;
}

}  // namespace

TEST_CASE("BinaryMask basics") {
  CHECK_THROWS_AS(BinaryMask(0, 5), ValidationError);
  CHECK_THROWS_AS(BinaryMask(5, -1), ValidationError);
  BinaryMask m(4, 3);
  CHECK(m.population() == 0);
  CHECK(m.empty());
  m.set(1, 2);
  m.set(1, 2);  // idempotent
  CHECK(m.population() == 1);
  CHECK(m.test(1, 2));
  CHECK_FALSE(m.test(2, 1));
  m.set(1, 2, false);
  CHECK(m.population() == 0);
  BinaryMask n(4, 3);
  CHECK(m == n);
  n.set(0, 0);
  CHECK(m != n);
}

TEST_CASE("RasterImage basics") {
  CHECK_THROWS_AS(RasterImage(0, 1), ValidationError);
  RasterImage img(3, 2);
  img.set_pixel(2, 1, 10, 20, 30);
  const auto* p = img.pixel(2, 1);
  CHECK(p[0] == 10);
  CHECK(p[1] == 20);
  CHECK(p[2] == 30);
  CHECK(img.data().size() == 3u * 2u * 3u);
  RasterImage other(3, 2);
  CHECK(img != other);
  other.set_pixel(2, 1, 10, 20, 30);
  CHECK(img == other);
}

TEST_CASE("StructuringElement must be odd") {
  CHECK_THROWS_AS(StructuringElement(0), ValidationError);
  CHECK_THROWS_AS(StructuringElement(2), ValidationError);
  CHECK_THROWS_AS(StructuringElement(-3), ValidationError);
  CHECK(StructuringElement(5).side == 5);
}

TEST_CASE("erosion clears a border even on a full mask") {
  const auto m = full_mask(7, 5);
  const auto e = erode(m, StructuringElement(3));
  CHECK(e == rect_mask(7, 5, 1, 1, 6, 4));
}

TEST_CASE("side-1 element is the identity") {
  std::mt19937 gen(42);
  const auto m = random_mask(9, 9, 0.4, gen);
  CHECK(erode(m, StructuringElement(1)) == m);
  CHECK(dilate(m, StructuringElement(1)) == m);
  CHECK(opening(m, StructuringElement(1)) == m);
}

TEST_CASE("morphology matches the brute-force oracle") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = 3 + static_cast<int>(gen() % 20);
    const int h = 3 + static_cast<int>(gen() % 20);
    const int side = (trial % 2 == 0) ? 3 : 5;
    if (side > std::min(w, h)) {
      continue;
    }
    const double density = 0.2 + 0.6 * (trial % 5) / 4.0;
    const auto m = random_mask(w, h, density, gen);
    CHECK(erode(m, StructuringElement(side)) == erode_oracle(m, side));
    CHECK(dilate(m, StructuringElement(side)) == dilate_oracle(m, side));
    CHECK(opening(m, StructuringElement(side)) ==
          dilate_oracle(erode_oracle(m, side), side));
  }
}

TEST_CASE("opening removes speckles but keeps solid regions") {
  auto m = rect_mask(20, 20, 4, 4, 14, 14);
  m.set(0, 0);    // isolated speckle
  m.set(18, 3);   // another
  const auto cleaned = opening(m, StructuringElement(3));
  CHECK_FALSE(cleaned.test(0, 0));
  CHECK_FALSE(cleaned.test(18, 3));
  CHECK(cleaned == rect_mask(20, 20, 4, 4, 14, 14));
}

TEST_CASE("element larger than the mask is rejected") {
  const auto m = full_mask(4, 4);
  CHECK_THROWS_AS(erode(m, StructuringElement(5)), ValidationError);
  CHECK_THROWS_AS(dilate(m, StructuringElement(5)), ValidationError);
}

TEST_CASE("set algebra") {
  const auto a = rect_mask(6, 4, 0, 0, 4, 4);
  const auto b = rect_mask(6, 4, 2, 0, 6, 4);
  CHECK(mask_and(a, b) == rect_mask(6, 4, 2, 0, 4, 4));
  CHECK(mask_or(a, b) == full_mask(6, 4));
  CHECK(mask_and_not(a, b) == rect_mask(6, 4, 0, 0, 2, 4));
  CHECK(mask_and_not(a, a).empty());
  const BinaryMask c(5, 4);
  CHECK_THROWS_AS(mask_and(a, c), ValidationError);
  CHECK_THROWS_AS(mask_or(a, c), ValidationError);
  CHECK_THROWS_AS(mask_and_not(a, c), ValidationError);
}

TEST_CASE("translate shifts and clips") {
  const auto m = rect_mask(5, 5, 1, 1, 3, 3);  // 2x2 block at (1,1)
  SUBCASE("plain shift") {
    const auto t = translate(m, 2, 1, 8, 8);
    CHECK(t == rect_mask(8, 8, 3, 2, 5, 4));
  }
  SUBCASE("clip at the far edge") {
    const auto t = translate(m, 3, 3, 5, 5);
    CHECK(t == rect_mask(5, 5, 4, 4, 5, 5));
    CHECK(t.population() == 1);
  }
  SUBCASE("clip at the near edge") {
    const auto t = translate(m, -2, -2, 5, 5);
    CHECK(t == rect_mask(5, 5, 0, 0, 1, 1));
  }
  SUBCASE("shifted fully outside") {
    CHECK(translate(m, 10, 0, 5, 5).empty());
    CHECK(translate(m, 0, -10, 5, 5).empty());
  }
}

TEST_CASE("tight_box") {
  CHECK_FALSE(tight_box(BinaryMask(4, 4)).has_value());
  BinaryMask single(6, 6);
  single.set(2, 3);
  CHECK(*tight_box(single) == PixelBox(2, 3, 3, 4));
  BinaryMask scattered(10, 8);
  scattered.set(1, 2);
  scattered.set(7, 5);
  scattered.set(4, 0);
  CHECK(*tight_box(scattered) == PixelBox(1, 0, 8, 6));
}

TEST_CASE("crop copies the window exactly") {
  const auto img = pattern_image(10, 8, 1);
  const PixelBox window(2, 3, 7, 6);
  const auto sub = crop(img, window);
  CHECK(sub.width() == 5);
  CHECK(sub.height() == 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 5; ++x) {
      const auto* want = img.pixel(2 + x, 3 + y);
      const auto* got = sub.pixel(x, y);
      CHECK(got[0] == want[0]);
      CHECK(got[1] == want[1]);
      CHECK(got[2] == want[2]);
    }
  }
  const auto m = rect_mask(10, 8, 4, 4, 9, 8);
  const auto sm = crop(m, window);
  CHECK(sm == rect_mask(5, 3, 2, 1, 5, 3));
  CHECK_THROWS_AS(crop(img, PixelBox(6, 0, 11, 4)), ValidationError);
  CHECK_THROWS_AS(crop(m, PixelBox(-1, 0, 4, 4)), ValidationError);
}

TEST_CASE("resize to identical dimensions is the identity") {
  const auto img = pattern_image(9, 7, 3);
  const auto m = rect_mask(9, 7, 2, 1, 8, 6);
  const auto out = resize_nearest(img, m, 9, 7);
  CHECK(out.pixels == img);
  CHECK(out.mask == m);
}

TEST_CASE("resize source mapping is the documented formula") {
  // Downscale 4 -> 2: sx = (2x+1)*4/4 = 2x+1, so columns 1 and 3 survive.
  const auto img = pattern_image(4, 4, 5);
  const auto out = resize_nearest(img, full_mask(4, 4), 2, 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      const auto* want = img.pixel(2 * x + 1, 2 * y + 1);
      const auto* got = out.pixels.pixel(x, y);
      CHECK(got[0] == want[0]);
      CHECK(got[1] == want[1]);
      CHECK(got[2] == want[2]);
    }
  }
  CHECK(out.mask == full_mask(2, 2));
}

TEST_CASE("resize upscale duplicates nearest pixels") {
  // Upscale 2 -> 4: sx = (2x+1)*2/8 = (2x+1)/4 -> 0,0,1,1.
  RasterImage img(2, 1);
  img.set_pixel(0, 0, 1, 1, 1);
  img.set_pixel(1, 0, 9, 9, 9);
  BinaryMask m(2, 1);
  m.set(1, 0);
  const auto out = resize_nearest(img, m, 4, 1);
  CHECK(out.pixels.pixel(0, 0)[0] == 1);
  CHECK(out.pixels.pixel(1, 0)[0] == 1);
  CHECK(out.pixels.pixel(2, 0)[0] == 9);
  CHECK(out.pixels.pixel(3, 0)[0] == 9);
  CHECK_FALSE(out.mask.test(0, 0));
  CHECK_FALSE(out.mask.test(1, 0));
  CHECK(out.mask.test(2, 0));
  CHECK(out.mask.test(3, 0));
}

TEST_CASE("resize keeps a nonempty mask nonempty via the centroid") {
  // A single set bit in a corner is skipped by 5->2 sampling (sx hits 1 and
  // 3, never 0); the fallback must still produce one bit.
  BinaryMask m(5, 5);
  m.set(0, 0);
  const auto out = resize_nearest(pattern_image(5, 5, 6), m, 2, 2);
  CHECK(out.mask.population() == 1);
  CHECK(out.mask.test(0, 0));
}

TEST_CASE("resize validates its inputs") {
  const auto img = pattern_image(4, 4, 7);
  CHECK_THROWS_AS(resize_nearest(img, BinaryMask(3, 4), 2, 2),
                  ValidationError);
  CHECK_THROWS_AS(resize_nearest(img, full_mask(4, 4), 0, 2),
                  ValidationError);
  CHECK_THROWS_AS(resize_nearest(img, full_mask(4, 4), 2, -1),
                  ValidationError);
}

TEST_CASE("fuse copies exactly the visible bits") {
  const auto bg = pattern_image(12, 10, 20);
  const auto fg = pattern_image(4, 4, 21);
  const auto visible = rect_mask(4, 4, 1, 1, 3, 3);
  const PixelPoint offset{5, 6};
  const auto out = fuse(bg, fg, visible, offset);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) {
      const int fx = x - offset.x;
      const int fy = y - offset.y;
      const bool covered = fx >= 0 && fx < 4 && fy >= 0 && fy < 4 &&
                           visible.test(fx, fy);
      const auto* want = covered ? fg.pixel(fx, fy) : bg.pixel(x, y);
      const auto* got = out.pixel(x, y);
      CHECK(got[0] == want[0]);
      CHECK(got[1] == want[1]);
      CHECK(got[2] == want[2]);
    }
  }
}

TEST_CASE("fuse clips at the borders") {
  const auto bg = pattern_image(8, 8, 22);
  const auto fg = pattern_image(4, 4, 23);
  const auto visible = full_mask(4, 4);
  const auto out = fuse(bg, fg, visible, PixelPoint{6, 6});  // 2x2 survives
  int changed = 0;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (std::memcmp(out.pixel(x, y), bg.pixel(x, y), 3) != 0) {
        ++changed;
      }
    }
  }
  CHECK(changed == 4);
}

TEST_CASE("fuse rejects an empty clipped footprint") {
  const auto bg = pattern_image(8, 8, 24);
  const auto fg = pattern_image(4, 4, 25);
  CHECK_THROWS_AS(fuse(bg, fg, full_mask(4, 4), PixelPoint{8, 0}),
                  PlacementError);
  CHECK_THROWS_AS(fuse(bg, fg, BinaryMask(4, 4), PixelPoint{0, 0}),
                  PlacementError);
  CHECK_THROWS_AS(fuse(bg, fg, full_mask(3, 4), PixelPoint{0, 0}),
                  ValidationError);
}

TEST_CASE("PNG round trip: RGB") {
  TempDir tmp;
  const auto path = tmp.path() / "rgb.png";
  const auto img = pattern_image(17, 11, 30);
  write_image_rgb(path, img);
  const auto decoded = read_png(path);
  CHECK(decoded.rgb == img);
  CHECK_FALSE(decoded.alpha_mask.has_value());
  CHECK_FALSE(decoded.grayscale);
  CHECK(read_image_rgb(path) == img);
}

TEST_CASE("PNG round trip: RGBA carries the mask") {
  TempDir tmp;
  const auto path = tmp.path() / "rgba.png";
  const auto img = pattern_image(9, 13, 31);
  const auto alpha = rect_mask(9, 13, 2, 2, 7, 11);
  write_image_rgba(path, img, alpha);
  const auto decoded = read_png(path);
  CHECK(decoded.rgb == img);
  REQUIRE(decoded.alpha_mask.has_value());
  CHECK(*decoded.alpha_mask == alpha);
  CHECK(read_mask(path) == alpha);
}

TEST_CASE("PNG round trip: grayscale mask") {
  TempDir tmp;
  const auto path = tmp.path() / "mask.png";
  const auto mask = rect_mask(21, 6, 3, 1, 18, 5);
  write_mask(path, mask);
  CHECK(read_mask(path) == mask);
  const auto decoded = read_png(path);
  CHECK(decoded.grayscale);
}

TEST_CASE("read_mask refuses a plain RGB image") {
  TempDir tmp;
  const auto path = tmp.path() / "rgb.png";
  write_image_rgb(path, pattern_image(5, 5, 32));
  CHECK_THROWS_AS(read_mask(path), ValidationError);
}

TEST_CASE("PNG reader reports missing and corrupt files") {
  TempDir tmp;
  CHECK_THROWS_AS(read_png(tmp.path() / "absent.png"), IoError);
  const auto path = tmp.path() / "junk.png";
  {
    std::ofstream out(path, std::ios::binary);
    out << "this is not a png";
  }
  CHECK_THROWS_AS(read_png(path), IoError);
}

TEST_CASE("PNG encoding is byte-stable") {
  TempDir tmp;
  const auto img = pattern_image(33, 17, 40);
  const auto a = tmp.path() / "a.png";
  const auto b = tmp.path() / "b.png";
  write_image_rgb(a, img);
  write_image_rgb(b, img);
  CHECK(pedsynth::testing::read_file_bytes(a) ==
        pedsynth::testing::read_file_bytes(b));
}
