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
#include <map>
#include <set>
#include <string>

#include "pedsynth/oda.hpp"
#include "test_support.hpp"

using namespace pedsynth;
using pedsynth::testing::full_mask;
using pedsynth::testing::pattern_image;
using pedsynth::testing::rect_mask;

namespace {

PedestrianAsset make_asset(const std::string& id, int w, int h,
                           Posture posture, std::uint8_t tag,
                           int border = 0) {
  RasterImage pixels = pattern_image(w, h, tag);
  BinaryMask mask = border > 0
                        ? rect_mask(w, h, border, border, w - border,
                                    h - border)
                        : full_mask(w, h);
  const auto tight = tight_box(mask);
  return PedestrianAsset{id,     std::move(pixels),        std::move(mask),
                         *tight, posture, AssetSource::real_cutout};
}

// Background with the same layout as the on-disk fixture: two disjoint
// 80x40 occluders sitting in the lower half of a 200x120 scene.
SceneBackground make_bg() {
  std::vector<OccluderRegion> occluders;
  occluders.push_back(OccluderRegion{OccluderKind::car_front,
                                     rect_mask(200, 120, 20, 60, 100, 100),
                                     PixelBox(20, 60, 100, 100)});
  occluders.push_back(OccluderRegion{OccluderKind::car_rear,
                                     rect_mask(200, 120, 110, 60, 190, 100),
                                     PixelBox(110, 60, 190, 100)});
  return SceneBackground{"bg", pattern_image(200, 120, 100),
                         std::move(occluders), std::nullopt};
}

std::vector<PedestrianAsset> make_assets() {
  std::vector<PedestrianAsset> assets;
  assets.push_back(make_asset("a0", 18, 40, Posture::standing, 10));
  assets.push_back(make_asset("a1", 22, 46, Posture::sitting, 11));
  assets.push_back(make_asset("a2", 26, 52, Posture::squatting, 12));
  return assets;
}

}  // namespace

TEST_CASE("OdaParams validation") {
  OdaParams p;
  CHECK_NOTHROW(p.validate());
  OdaParams bad = p;
  bad.band_lo = 0.3;
  bad.band_hi = 0.2;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.band_hi = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.max_occluders = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.retry_budget = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.cleanup_element_side = 4;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.human_height_m = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("scaled_width rounds half-up in integer arithmetic") {
  // Aspect-preserving exact cases.
  CHECK(scaled_width(30, 170, 170) == 30);
  CHECK(scaled_width(40, 200, 100) == 20);
  // Exact halves round up.
  CHECK(scaled_width(3, 2, 1) == 2);   // 1.5 -> 2
  CHECK(scaled_width(5, 4, 2) == 3);   // 2.5 -> 3
  // Below one half rounds to zero.
  CHECK(scaled_width(1, 300, 10) == 0);  // 0.033...
  CHECK(scaled_width(1, 3, 1) == 0);     // 0.33
  CHECK(scaled_width(1, 2, 1) == 1);     // 0.5 -> 1
  CHECK_THROWS_AS(scaled_width(0, 10, 10), ValidationError);
  CHECK_THROWS_AS(scaled_width(10, 0, 10), ValidationError);
  CHECK_THROWS_AS(scaled_width(10, 10, 0), ValidationError);
}

TEST_CASE("occlusion_aware_scale crops to the tight box first") {
  // 10x20 canvas, mask occupies (2,4)-(8,16): tight 6x12.
  auto asset = make_asset("a", 10, 20, Posture::standing, 1);
  asset.mask = rect_mask(10, 20, 2, 4, 8, 16);
  asset.tight = *tight_box(asset.mask);
  const auto resized = occlusion_aware_scale(asset, 24);
  // w' = round(6 * 24 / 12) = 12.
  CHECK(resized.pixels.width() == 12);
  CHECK(resized.pixels.height() == 24);
  CHECK(resized.mask.width() == 12);
  CHECK(resized.mask.height() == 24);
  CHECK(resized.mask.population() == 12 * 24);  // solid rect stays solid
}

TEST_CASE("occlusion_aware_scale rejects collapse to zero width") {
  // 1x300 sliver: w' = round(1 * 10 / 300) = 0.
  const auto asset = make_asset("sliver", 1, 300, Posture::standing, 2);
  CHECK_THROWS_AS(occlusion_aware_scale(asset, 10), DegenerateAssetError);
  CHECK_THROWS_AS(occlusion_aware_scale(asset, 0), ValidationError);
}

TEST_CASE("sample_offset obeys Eq. 4 bounds") {
  // Width 200 occluder and width-200 pedestrian force x = x1; height 60
  // gives u in [12, 18], so y = 200 - u in [182, 188].
  const PixelBox car_box(100, 200, 300, 260);
  Rng rng(31);
  std::set<int> seen_y;
  for (int i = 0; i < 2000; ++i) {
    const auto off = sample_offset(car_box, 200, 0.2, 0.3, rng);
    CHECK(off.x == 100);
    CHECK(off.y >= 182);
    CHECK(off.y <= 188);
    seen_y.insert(off.y);
  }
  CHECK(seen_y.size() == 7);  // every u in [12,18] occurs

  // Free x: stays within [x1, x2 - w'].
  std::set<int> seen_x;
  for (int i = 0; i < 2000; ++i) {
    const auto off = sample_offset(car_box, 150, 0.2, 0.3, rng);
    CHECK(off.x >= 100);
    CHECK(off.x <= 150);
    seen_x.insert(off.x);
  }
  CHECK(seen_x.size() == 51);

  CHECK_THROWS_AS(sample_offset(car_box, 201, 0.2, 0.3, rng),
                  PlacementError);
  CHECK_THROWS_AS(sample_offset(car_box, 0, 0.2, 0.3, rng), ValidationError);
}

TEST_CASE("carve_occlusion splits visible from occluded") {
  SUBCASE("disjoint: everything stays visible") {
    const auto ped = rect_mask(10, 10, 0, 0, 4, 4);
    const auto car = rect_mask(10, 10, 5, 5, 9, 9);
    const auto result = carve_occlusion(ped, car);
    CHECK(result.visible == ped);
    CHECK(result.occluded_count == 0);
  }
  SUBCASE("half-plane: half the pixels go hidden") {
    const auto ped = full_mask(10, 10);
    const auto car = rect_mask(10, 10, 5, 0, 10, 10);
    const auto result = carve_occlusion(ped, car);
    CHECK(result.visible == rect_mask(10, 10, 0, 0, 5, 10));
    CHECK(result.occluded_count == 50);
  }
  SUBCASE("contained: fully occluded is an error") {
    const auto ped = rect_mask(10, 10, 2, 2, 6, 6);
    const auto car = full_mask(10, 10);
    CHECK_THROWS_AS(carve_occlusion(ped, car), PlacementError);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(carve_occlusion(full_mask(4, 4), full_mask(5, 4)),
                    ValidationError);
  }
}

TEST_CASE("generate_oda produces a consistent record") {
  const auto bg = make_bg();
  const auto assets = make_assets();
  OdaParams params;
  Rng rng = record_rng(9, 0);
  const auto record = generate_oda(bg, assets, params, rng,
                                   RecordContext{9, 0});

  CHECK(record.generator == Generator::oda);
  CHECK(record.background_id == "bg");
  CHECK(record.record_index == 0);
  CHECK(record.seed == 9);
  CHECK(record.image.width() == 200);
  CHECK(record.image.height() == 120);
  REQUIRE(!record.placements.empty());
  REQUIRE(record.labels.size() == record.placements.size());
  CHECK(record.placements.size() <= 2);  // one placement per occluder

  std::map<std::string, Posture> posture_of;
  for (const auto& a : assets) {
    posture_of[a.id] = a.posture;
  }
  std::set<int> used_occluders;
  for (std::size_t i = 0; i < record.placements.size(); ++i) {
    const auto& placement = record.placements[i];
    const auto& label = record.labels[i];

    REQUIRE(placement.occluder_index.has_value());
    CHECK(used_occluders.insert(*placement.occluder_index).second);
    const auto& occluder =
        bg.occluders[static_cast<std::size_t>(*placement.occluder_index)];

    // The label mirrors the placement.
    CHECK(label.box == *tight_box(placement.visible));
    CHECK(label.occluder_kind == occluder.kind);
    REQUIRE(label.posture.has_value());
    CHECK(*label.posture == posture_of.at(placement.asset_id));
    CHECK(label.generator == Generator::oda);
    CHECK(label.provenance.asset_id == placement.asset_id);
    CHECK(label.provenance.background_id == "bg");
    CHECK(label.provenance.occluder_index == placement.occluder_index);
    CHECK(label.provenance.seed == 9);
    CHECK(label.provenance.record_index == 0);

    // The fixture geometry pins the occlusion rate to [0.7, 0.8].
    CHECK(label.bucket.index >= 7);
    CHECK(label.bucket.index <= 8);

    // The resized pedestrian is as tall as its occluder.
    CHECK(placement.resized_mask.height() == occluder.box.height());

    // visible/occluded partition placed exactly.
    CHECK(mask_and(placement.visible, placement.occluded).empty());
    CHECK(mask_or(placement.visible, placement.occluded) == placement.placed);
  }
}

TEST_CASE("generate_oda fuses exactly the visible pixels") {
  const auto bg = make_bg();
  const auto assets = make_assets();
  Rng rng = record_rng(77, 4);
  const auto record = generate_oda(bg, assets, OdaParams{}, rng,
                                   RecordContext{77, 4});

  // Union of all visible masks: those pixels must come from the pasted
  // pedestrians; everything else must still equal the background.
  BinaryMask any_visible(200, 120);
  for (const auto& placement : record.placements) {
    any_visible = mask_or(any_visible, placement.visible);
  }
  for (int y = 0; y < 120; ++y) {
    for (int x = 0; x < 200; ++x) {
      if (!any_visible.test(x, y)) {
        CHECK(std::memcmp(record.image.pixel(x, y), bg.pixels.pixel(x, y),
                          3) == 0);
      }
    }
  }
  for (const auto& placement : record.placements) {
    for (int y = 0; y < 120; ++y) {
      for (int x = 0; x < 200; ++x) {
        if (placement.visible.test(x, y)) {
          const auto* got = record.image.pixel(x, y);
          const auto* want = placement.resized_pixels.pixel(
              x - placement.offset.x, y - placement.offset.y);
          CHECK(std::memcmp(got, want, 3) == 0);
        }
      }
    }
  }
}

TEST_CASE("generate_oda is deterministic in (seed, index)") {
  const auto bg = make_bg();
  const auto assets = make_assets();
  Rng r1 = record_rng(123, 5);
  Rng r2 = record_rng(123, 5);
  const auto a = generate_oda(bg, assets, OdaParams{}, r1,
                              RecordContext{123, 5});
  const auto b = generate_oda(bg, assets, OdaParams{}, r2,
                              RecordContext{123, 5});
  CHECK(a.image == b.image);
  CHECK(a.labels == b.labels);

  Rng r3 = record_rng(123, 6);
  const auto c = generate_oda(bg, assets, OdaParams{}, r3,
                              RecordContext{123, 6});
  CHECK(a.image != c.image);  // neighboring stream lands elsewhere
}

TEST_CASE("generate_oda respects max_occluders") {
  const auto bg = make_bg();
  const auto assets = make_assets();
  OdaParams params;
  params.max_occluders = 1;
  for (std::uint64_t index = 0; index < 8; ++index) {
    Rng rng = record_rng(50, index);
    const auto record = generate_oda(bg, assets, params, rng,
                                     RecordContext{50, static_cast<std::int64_t>(index)});
    CHECK(record.placements.size() == 1);
  }
}

TEST_CASE("generate_oda layering keeps visible masks disjoint") {
  // One wide occluder plus one overlapping it: pedestrians can collide, and
  // the later one must yield.
  std::vector<OccluderRegion> occluders;
  occluders.push_back(OccluderRegion{OccluderKind::car_front,
                                     rect_mask(200, 120, 20, 60, 120, 100),
                                     PixelBox(20, 60, 120, 100)});
  occluders.push_back(OccluderRegion{OccluderKind::car_rear,
                                     rect_mask(200, 120, 60, 60, 160, 100),
                                     PixelBox(60, 60, 160, 100)});
  const SceneBackground bg{"overlap", pattern_image(200, 120, 90),
                           std::move(occluders), std::nullopt};
  const auto assets = make_assets();
  int multi = 0;
  for (std::uint64_t index = 0; index < 32; ++index) {
    Rng rng = record_rng(4242, index);
    SyntheticRecord record{0, 0, "", Generator::oda, RasterImage(1, 1), {},
                           {}};
    try {
      record = generate_oda(bg, assets, OdaParams{}, rng,
                            RecordContext{4242, static_cast<std::int64_t>(index)});
    } catch (const GenerationError&) {
      continue;  // every attempt may legitimately fail on this geometry
    }
    if (record.placements.size() > 1) {
      ++multi;
    }
    for (std::size_t i = 0; i < record.placements.size(); ++i) {
      for (std::size_t j = i + 1; j < record.placements.size(); ++j) {
        CHECK(mask_and(record.placements[i].visible,
                       record.placements[j].visible)
                  .empty());
      }
    }
  }
  CHECK(multi > 0);  // the loop exercised actual multi-pedestrian layering
}

TEST_CASE("generate_oda cleans masks when asked") {
  // A speckled mask: solid body plus a distant stray pixel that inflates the
  // tight box. Cleanup must drop the speckle before resizing.
  auto noisy = make_asset("noisy", 30, 60, Posture::standing, 5);
  noisy.mask = rect_mask(30, 60, 8, 10, 24, 50);
  noisy.mask.set(0, 0);  // speckle in the far corner
  noisy.tight = *tight_box(noisy.mask);
  CHECK(noisy.tight == PixelBox(0, 0, 24, 50));

  OdaParams params;
  params.clean_masks = true;
  const auto bg = make_bg();
  Rng rng = record_rng(8, 1);
  const auto record = generate_oda(bg, {noisy}, params, rng,
                                   RecordContext{8, 1});
  REQUIRE(!record.placements.empty());
  const auto& placement = record.placements[0];
  // Cleaned tight box is the body rect eroded by one pixel: 14x38 scaled to
  // the 40-pixel occluder height.
  CHECK(placement.resized_mask.height() == 40);
  CHECK(placement.resized_mask.width() == scaled_width(14, 38, 40));
}

TEST_CASE("generate_oda reports unusable pools") {
  const auto bg = make_bg();
  const auto assets = make_assets();
  Rng rng(1);
  CHECK_THROWS_AS(generate_oda(bg, {}, OdaParams{}, rng, RecordContext{1, 0}),
                  GenerationError);
  const SceneBackground no_occ{"empty", pattern_image(50, 50, 3), {},
                               std::nullopt};
  CHECK_THROWS_AS(
      generate_oda(no_occ, assets, OdaParams{}, rng, RecordContext{1, 0}),
      GenerationError);
}

TEST_CASE("generate_oda fails cleanly when every asset is too wide") {
  // Occluder is a 5-pixel-wide sliver; every asset resizes wider than that.
  std::vector<OccluderRegion> occluders;
  occluders.push_back(OccluderRegion{OccluderKind::cube_obstacle,
                                     rect_mask(200, 120, 50, 60, 55, 100),
                                     PixelBox(50, 60, 55, 100)});
  const SceneBackground bg{"sliver", pattern_image(200, 120, 80),
                           std::move(occluders), std::nullopt};
  const auto assets = make_assets();  // w' >= 16 against h_car = 40
  Rng rng(2);
  try {
    generate_oda(bg, assets, OdaParams{}, rng, RecordContext{2, 0});
    FAIL("expected GenerationError");
  } catch (const GenerationError& e) {
    CHECK(std::string(e.what()).find("asset wider than occluder") !=
          std::string::npos);
  }
}
