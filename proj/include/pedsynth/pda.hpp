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

// Pos-Data-Augmentation: paste a posture-varied pedestrian cut-out onto the
// drivable freespace of a background at full visibility.

#pragma once

#include <optional>
#include <vector>

#include "pedsynth/corpus.hpp"
#include "pedsynth/geometry.hpp"
#include "pedsynth/raster.hpp"
#include "pedsynth/record.hpp"
#include "pedsynth/rng.hpp"

namespace pedsynth {

struct PdaParams {
  // Limited rescale multipliers; s is drawn uniformly from [lo, hi).
  double scale_lo = 0.8;
  double scale_hi = 1.2;
  // When set, at least this fraction of the footprint's bottom-row columns
  // must sit on freespace at the ground row; 1.0 demands the whole bottom
  // row. Unset: only the bottom-center anchor pixel must touch freespace.
  std::optional<double> min_ground_coverage;
  int retry_budget = 16;
  int pedestrians = 1;  // pasted per record; overlaps are rejected

  void validate() const;  // throws ValidationError
};

// Picks a top-left offset so the footprint's bottom-center ground pixel --
// the pixel at (offset.x + w/2, offset.y + h), just below the feet -- is a
// set freespace bit and the footprint lies fully inside the image. Samples
// uniformly among set bits, rejecting infeasible anchors, up to retry_budget
// draws. Throws PlacementError when no feasible anchor is found (or the
// freespace mask is empty); ValidationError when the footprint cannot fit
// at all.
PixelPoint sample_freespace_anchor(const BinaryMask& freespace,
                                   int footprint_w, int footprint_h,
                                   std::optional<double> min_ground_coverage,
                                   int retry_budget, Rng& rng);

// Uniform scale s ~ U[lo, hi) applied to both tight-box dimensions
// (rounded half-up). Throws DegenerateAssetError when a dimension rounds
// to zero.
MaskedImage limited_rescale(const PedestrianAsset& asset, double scale_lo,
                            double scale_hi, Rng& rng);

// Full Algorithm 2 for one record. Per-record draw order: for each pasted
// pedestrian, attempts draw (asset index, scale, anchor draws) until one
// placement succeeds or the budget runs out. Every label gets occlusion
// bucket 0, so candidate placements overlapping an earlier one are rejected.
// Throws GenerationError when the background has no freespace mask, the
// pool is empty, or no placement succeeds.
SyntheticRecord generate_pda(const SceneBackground& bg,
                             const std::vector<PedestrianAsset>& assets,
                             const PdaParams& params, Rng& rng,
                             const RecordContext& ctx);

}  // namespace pedsynth
