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

#include "pedsynth/oda.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "pedsynth/errors.hpp"

namespace pedsynth {

void OdaParams::validate() const {
  if (!(human_height_m > 0.0) || !(human_width_m > 0.0)) {
    throw ValidationError("OdaParams: H_p and W_p must be positive");
  }
  if (!(band_lo >= 0.0 && band_lo < band_hi && band_hi <= 1.0)) {
    throw ValidationError("OdaParams: band must satisfy 0 <= lo < hi <= 1");
  }
  if (max_occluders < 1) {
    throw ValidationError("OdaParams: max_occluders must be >= 1");
  }
  if (retry_budget < 1) {
    throw ValidationError("OdaParams: retry_budget must be >= 1");
  }
  if (cleanup_element_side < 1 || cleanup_element_side % 2 == 0) {
    throw ValidationError("OdaParams: cleanup element side must be odd");
  }
}

int scaled_width(int w_p, int h_p, int h_car) {
  if (w_p < 1 || h_p < 1 || h_car < 1) {
    throw ValidationError("scaled_width: dimensions must be >= 1");
  }
  const std::int64_t num =
      2 * static_cast<std::int64_t>(w_p) * h_car + h_p;  // adds the half
  return static_cast<int>(num / (2 * static_cast<std::int64_t>(h_p)));
}

MaskedImage occlusion_aware_scale(const PedestrianAsset& asset, int h_car) {
  if (h_car < 1) {
    throw ValidationError("occlusion_aware_scale: h_car must be >= 1");
  }
  const int w_p = asset.tight.width();
  const int h_p = asset.tight.height();
  const int new_w = scaled_width(w_p, h_p, h_car);
  if (new_w < 1) {
    throw DegenerateAssetError("asset \"" + asset.id +
                               "\": resized width rounds to zero for h_car=" +
                               std::to_string(h_car));
  }
  return resize_nearest(crop(asset.pixels, asset.tight),
                        crop(asset.mask, asset.tight), new_w, h_car);
}

PixelPoint sample_offset(const PixelBox& car_box, int w_p_resized,
                         double band_lo, double band_hi, Rng& rng) {
  if (w_p_resized < 1) {
    throw ValidationError("sample_offset: resized width must be >= 1");
  }
  if (w_p_resized > car_box.width()) {
    throw PlacementError("pedestrian width " + std::to_string(w_p_resized) +
                         " exceeds occluder span " +
                         std::to_string(car_box.width()));
  }
  const int h_car = car_box.height();
  const int x = static_cast<int>(
      rng.uniform_int(car_box.x1, car_box.x2 - w_p_resized));
  const int u_lo = static_cast<int>(std::floor(band_lo * h_car));
  const int u_hi = static_cast<int>(std::floor(band_hi * h_car));
  const int u = static_cast<int>(rng.uniform_int(u_lo, u_hi));
  return PixelPoint{x, car_box.y1 - u};
}

CarveResult carve_occlusion(const BinaryMask& ped_mask_placed,
                            const BinaryMask& car_mask) {
  const std::int64_t occluded =
      mask_and(ped_mask_placed, car_mask).population();
  BinaryMask visible = mask_and_not(ped_mask_placed, car_mask);
  if (visible.empty()) {
    throw PlacementError("pedestrian fully occluded");
  }
  return CarveResult{std::move(visible), occluded};
}

namespace {

struct AttemptFailure {
  std::map<std::string, int> reasons;

  void note(const std::string& reason) { ++reasons[reason]; }

  std::string summary() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [reason, count] : reasons) {
      if (!first) {
        out << ", ";
      }
      out << count << "x " << reason;
      first = false;
    }
    return std::move(out).str();
  }
};

}  // namespace

SyntheticRecord generate_oda(const SceneBackground& bg,
                             const std::vector<PedestrianAsset>& assets,
                             const OdaParams& params, Rng& rng,
                             const RecordContext& ctx) {
  params.validate();
  if (assets.empty()) {
    throw GenerationError("ODA: asset pool is empty");
  }
  if (bg.occluders.empty()) {
    throw GenerationError("ODA: background \"" + bg.id +
                          "\" has no occluder regions");
  }
  const int bg_w = bg.pixels.width();
  const int bg_h = bg.pixels.height();

  const int available = static_cast<int>(bg.occluders.size());
  const int t = static_cast<int>(
      rng.uniform_int(1, std::min(params.max_occluders, available)));
  std::vector<int> occluder_order(bg.occluders.size());
  for (std::size_t i = 0; i < occluder_order.size(); ++i) {
    occluder_order[i] = static_cast<int>(i);
  }
  shuffle_in_place(occluder_order, rng);

  SyntheticRecord record{ctx.record_index, ctx.seed,  bg.id,
                         Generator::oda,   bg.pixels, {},
                         {}};
  std::vector<Posture> postures;  // parallel to record.placements
  AttemptFailure failures;

  for (int pick = 0; pick < t; ++pick) {
    const int occluder_index = occluder_order[static_cast<std::size_t>(pick)];
    const OccluderRegion& occluder =
        bg.occluders[static_cast<std::size_t>(occluder_index)];

    for (int attempt = 0; attempt < params.retry_budget; ++attempt) {
      const auto asset_index = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(assets.size()) - 1));
      const PedestrianAsset& asset = assets[asset_index];

      MaskedImage resized{RasterImage(1, 1), BinaryMask(1, 1)};
      try {
        if (params.clean_masks) {
          const StructuringElement element(params.cleanup_element_side);
          BinaryMask cleaned = erode(opening(asset.mask, element), element);
          const auto tight = tight_box(cleaned);
          if (!tight) {
            throw DegenerateAssetError("asset \"" + asset.id +
                                       "\": mask cleanup left no pixels");
          }
          PedestrianAsset cleaned_asset{asset.id, asset.pixels,
                                        std::move(cleaned), *tight,
                                        asset.posture, asset.source};
          resized = occlusion_aware_scale(cleaned_asset, occluder.box.height());
        } else {
          resized = occlusion_aware_scale(asset, occluder.box.height());
        }
      } catch (const DegenerateAssetError&) {
        failures.note("degenerate asset after resize");
        continue;
      }

      PixelPoint offset{0, 0};
      try {
        offset = sample_offset(occluder.box, resized.mask.width(),
                               params.band_lo, params.band_hi, rng);
      } catch (const PlacementError&) {
        failures.note("asset wider than occluder");
        continue;
      }

      BinaryMask placed = translate(resized.mask, offset.x, offset.y, bg_w,
                                    bg_h);
      if (placed.empty()) {
        failures.note("placement clipped to nothing");
        continue;
      }

      BinaryMask visible(bg_w, bg_h);
      try {
        visible = carve_occlusion(placed, occluder.mask).visible;
      } catch (const PlacementError&) {
        failures.note("fully occluded");
        continue;
      }
      // Later placements go behind the ones already in the image.
      for (const PlacementDebug& earlier : record.placements) {
        visible = mask_and_not(visible, earlier.visible);
      }
      if (visible.empty()) {
        failures.note("hidden behind earlier placement");
        continue;
      }
      const double rate =
          occlusion_rate(visible.population(), placed.population());
      if (!bucket_of(rate)) {
        failures.note("occlusion rate above 99%");
        continue;
      }

      record.placements.push_back(PlacementDebug{
          asset.id, occluder_index, offset, std::move(resized.pixels),
          std::move(resized.mask), std::move(placed), std::move(visible),
          BinaryMask(bg_w, bg_h)});
      postures.push_back(asset.posture);
      break;
    }
  }

  if (record.placements.empty()) {
    throw GenerationError("ODA: no successful placement on background \"" +
                          bg.id + "\" (" + failures.summary() + ")");
  }

  // Fuse every placement (Eq. 5) and derive its label from the final masks.
  for (std::size_t i = 0; i < record.placements.size(); ++i) {
    PlacementDebug& placement = record.placements[i];
    placement.occluded = mask_and_not(placement.placed, placement.visible);
    const BinaryMask visible_fg =
        translate(placement.visible, -placement.offset.x, -placement.offset.y,
                  placement.resized_mask.width(),
                  placement.resized_mask.height());
    record.image = fuse(record.image, placement.resized_pixels, visible_fg,
                        placement.offset);

    const double rate = occlusion_rate(placement.visible.population(),
                                       placement.placed.population());
    const auto bucket = bucket_of(rate);
    if (!bucket) {
      throw GenerationError("ODA: bucket vanished after layering");
    }
    const auto box = tight_box(placement.visible);
    const auto& occluder =
        bg.occluders[static_cast<std::size_t>(*placement.occluder_index)];
    record.labels.push_back(PseudoLabel{
        *box, *bucket, postures[i], occluder.kind, Generator::oda,
        Provenance{placement.asset_id, bg.id, placement.occluder_index,
                   ctx.seed, ctx.record_index}});
  }
  return record;
}

}  // namespace pedsynth
