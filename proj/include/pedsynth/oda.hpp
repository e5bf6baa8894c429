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

// Occ-Data-Augmentation: paste a pedestrian cut-out partially behind an
// annotated occluder so the occluder hides part of the body.

#pragma once

#include <cstdint>
#include <vector>

#include "pedsynth/annotate.hpp"
#include "pedsynth/corpus.hpp"
#include "pedsynth/geometry.hpp"
#include "pedsynth/raster.hpp"
#include "pedsynth/record.hpp"
#include "pedsynth/rng.hpp"

namespace pedsynth {

struct OdaParams {
  // Average human dimension priors; the resize path itself works from the
  // asset's pixel aspect ratio, these parameterize the size estimator.
  double human_height_m = kHumanHeightMeters;  // H_p
  double human_width_m = kHumanWidthMeters;    // W_p
  // Vertical offset band as fractions of the occluder height (Eq. 4 bounds).
  double band_lo = 0.2;
  double band_hi = 0.3;
  int max_occluders = 3;  // T_max: occluders used per record at most
  int retry_budget = 16;  // placement attempts per chosen occluder
  // Optional asset-mask cleanup (OPEN then ERODE) before resizing; normally
  // masks arrive already cleaned by prepare-masks, so this defaults off.
  bool clean_masks = false;
  int cleanup_element_side = 3;

  void validate() const;  // throws ValidationError
};

// w' = round_half_up(w_p * h_car / h_p), in exact integer arithmetic.
int scaled_width(int w_p, int h_p, int h_car);

// Crops the asset to its tight box and resizes it so the new height is
// exactly h_car and the width follows scaled_width. Throws
// DegenerateAssetError when the width rounds to zero.
MaskedImage occlusion_aware_scale(const PedestrianAsset& asset, int h_car);

// P_off per Eq. 4: x uniform on [x1, x2 - w_p_resized], then
// y = y1 - u with u uniform on [floor(band_lo*h_car), floor(band_hi*h_car)].
// Draw order is x first, u second. y may be negative; clipping happens at
// fusion. Throws PlacementError when the pedestrian is wider than the
// occluder span.
PixelPoint sample_offset(const PixelBox& car_box, int w_p_resized,
                         double band_lo, double band_hi, Rng& rng);

struct CarveResult {
  BinaryMask visible;            // ped AND NOT car
  std::int64_t occluded_count;   // |ped AND car|
};

// Algorithm 1 lines 12-13. Masks must share dimensions (background frame).
// Throws PlacementError when nothing stays visible.
CarveResult carve_occlusion(const BinaryMask& ped_mask_placed,
                            const BinaryMask& car_mask);

// Full Algorithm 1 for one record. Per-record draw order, fixed for
// reproducibility:
//   1. t = uniform[1, min(max_occluders, #occluders)]
//   2. Fisher-Yates shuffle of occluder indices; the first t are used
//   3. per occluder, up to retry_budget attempts, each drawing: asset index,
//      then the two Eq. 4 offset draws
// A later placement goes behind earlier ones: its visible mask subtracts
// their visible pixels, and every bucket is recomputed from the final masks.
// Throws GenerationError when no placement succeeds.
SyntheticRecord generate_oda(const SceneBackground& bg,
                             const std::vector<PedestrianAsset>& assets,
                             const OdaParams& params, Rng& rng,
                             const RecordContext& ctx);

}  // namespace pedsynth
