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

#include "pedsynth/pda.hpp"

#include <cmath>
#include <utility>

#include "pedsynth/errors.hpp"

namespace pedsynth {

void PdaParams::validate() const {
  if (!(scale_lo > 0.0) || !(scale_lo <= scale_hi)) {
    throw ValidationError("PdaParams: scale range must satisfy 0 < lo <= hi");
  }
  if (min_ground_coverage &&
      !(*min_ground_coverage > 0.0 && *min_ground_coverage <= 1.0)) {
    throw ValidationError("PdaParams: ground coverage must lie in (0, 1]");
  }
  if (retry_budget < 1) {
    throw ValidationError("PdaParams: retry_budget must be >= 1");
  }
  if (pedestrians < 1) {
    throw ValidationError("PdaParams: pedestrians must be >= 1");
  }
}

PixelPoint sample_freespace_anchor(const BinaryMask& freespace,
                                   int footprint_w, int footprint_h,
                                   std::optional<double> min_ground_coverage,
                                   int retry_budget, Rng& rng) {
  if (footprint_w < 1 || footprint_h < 1) {
    throw ValidationError("sample_freespace_anchor: footprint must be >= 1x1");
  }
  if (footprint_w > freespace.width() || footprint_h > freespace.height()) {
    throw ValidationError(
        "sample_freespace_anchor: footprint larger than the image");
  }
  if (freespace.empty()) {
    throw PlacementError("freespace mask is empty");
  }

  std::vector<PixelPoint> bits;
  bits.reserve(static_cast<std::size_t>(freespace.population()));
  for (int y = 0; y < freespace.height(); ++y) {
    for (int x = 0; x < freespace.width(); ++x) {
      if (freespace.test(x, y)) {
        bits.push_back(PixelPoint{x, y});
      }
    }
  }

  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    const auto& ground = bits[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(bits.size()) - 1))];
    const PixelPoint offset{ground.x - footprint_w / 2,
                            ground.y - footprint_h};
    if (offset.x < 0 || offset.y < 0 ||
        offset.x + footprint_w > freespace.width() ||
        offset.y + footprint_h > freespace.height()) {
      continue;
    }
    if (min_ground_coverage) {
      int on_ground = 0;
      for (int x = offset.x; x < offset.x + footprint_w; ++x) {
        if (freespace.test(x, ground.y)) {
          ++on_ground;
        }
      }
      if (on_ground < *min_ground_coverage * footprint_w) {
        continue;
      }
    }
    return offset;
  }
  throw PlacementError("no feasible freespace anchor within " +
                       std::to_string(retry_budget) + " attempts");
}

MaskedImage limited_rescale(const PedestrianAsset& asset, double scale_lo,
                            double scale_hi, Rng& rng) {
  const double s = rng.uniform_double(scale_lo, scale_hi);
  const auto half_up = [](double v) {
    return static_cast<int>(std::floor(v + 0.5));
  };
  const int new_w = half_up(asset.tight.width() * s);
  const int new_h = half_up(asset.tight.height() * s);
  if (new_w < 1 || new_h < 1) {
    throw DegenerateAssetError("asset \"" + asset.id +
                               "\": dimension rounds to zero at scale " +
                               std::to_string(s));
  }
  return resize_nearest(crop(asset.pixels, asset.tight),
                        crop(asset.mask, asset.tight), new_w, new_h);
}

SyntheticRecord generate_pda(const SceneBackground& bg,
                             const std::vector<PedestrianAsset>& assets,
                             const PdaParams& params, Rng& rng,
                             const RecordContext& ctx) {
  params.validate();
  if (assets.empty()) {
    throw GenerationError("PDA: asset pool is empty");
  }
  if (!bg.freespace) {
    throw GenerationError("PDA: background \"" + bg.id +
                          "\" has no freespace mask");
  }
  const int bg_w = bg.pixels.width();
  const int bg_h = bg.pixels.height();

  SyntheticRecord record{ctx.record_index, ctx.seed,  bg.id,
                         Generator::pda,   bg.pixels, {},
                         {}};
  std::vector<Posture> postures;  // parallel to record.placements

  for (int ped = 0; ped < params.pedestrians; ++ped) {
    for (int attempt = 0; attempt < params.retry_budget; ++attempt) {
      const auto asset_index = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(assets.size()) - 1));
      const PedestrianAsset& asset = assets[asset_index];

      MaskedImage resized{RasterImage(1, 1), BinaryMask(1, 1)};
      try {
        resized = limited_rescale(asset, params.scale_lo, params.scale_hi,
                                  rng);
      } catch (const DegenerateAssetError&) {
        continue;
      }
      if (resized.mask.width() > bg_w || resized.mask.height() >= bg_h) {
        // >= for the height: the ground pixel must exist below the feet.
        continue;
      }

      PixelPoint offset{0, 0};
      try {
        offset = sample_freespace_anchor(*bg.freespace, resized.mask.width(),
                                         resized.mask.height(),
                                         params.min_ground_coverage,
                                         params.retry_budget, rng);
      } catch (const PlacementError&) {
        continue;
      }

      BinaryMask placed = translate(resized.mask, offset.x, offset.y, bg_w,
                                    bg_h);
      bool overlaps = false;
      for (const PlacementDebug& earlier : record.placements) {
        if (!mask_and(placed, earlier.placed).empty()) {
          overlaps = true;
          break;
        }
      }
      if (overlaps) {
        continue;
      }

      record.image =
          fuse(record.image, resized.pixels, resized.mask, offset);
      BinaryMask visible = placed;
      record.placements.push_back(PlacementDebug{
          asset.id, std::nullopt, offset, std::move(resized.pixels),
          std::move(resized.mask), std::move(placed), std::move(visible),
          BinaryMask(bg_w, bg_h)});
      postures.push_back(asset.posture);
      break;
    }
  }

  if (record.placements.empty()) {
    throw GenerationError("PDA: no successful placement on background \"" +
                          bg.id + "\" within the retry budget");
  }

  for (std::size_t i = 0; i < record.placements.size(); ++i) {
    const PlacementDebug& placement = record.placements[i];
    const double rate = occlusion_rate(placement.visible.population(),
                                       placement.placed.population());
    const auto bucket = bucket_of(rate);  // always bucket 0 here
    const auto box = tight_box(placement.placed);
    record.labels.push_back(PseudoLabel{
        *box, *bucket, postures[i], std::nullopt, Generator::pda,
        Provenance{placement.asset_id, bg.id, std::nullopt, ctx.seed,
                   ctx.record_index}});
  }
  return record;
}

}  // namespace pedsynth
