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
#include <string>
#include <vector>

#include "pedsynth/annotate.hpp"
#include "pedsynth/geometry.hpp"
#include "pedsynth/raster.hpp"

namespace pedsynth {

// Identifies the record being generated; flows into label provenance.
struct RecordContext {
  std::uint64_t seed = 0;
  std::int64_t record_index = 0;
};

// Everything needed to audit one pasted asset after the fact. All
// background-frame masks share the background dimensions; `visible` is the
// final visibility after occluder carving and pedestrian layering, and
// `occluded` is its exact complement within `placed`.
struct PlacementDebug {
  std::string asset_id;
  std::optional<int> occluder_index;
  PixelPoint offset;           // top-left of the resized asset, may be off-image
  RasterImage resized_pixels;  // asset frame
  BinaryMask resized_mask;     // asset frame
  BinaryMask placed;           // background frame, clipped to bounds
  BinaryMask visible;          // background frame
  BinaryMask occluded;         // background frame
};

struct SyntheticRecord {
  std::int64_t record_index = 0;
  std::uint64_t seed = 0;
  std::string background_id;
  Generator generator = Generator::manual;
  RasterImage image;
  // labels[i] describes placements[i].
  std::vector<PseudoLabel> labels;
  std::vector<PlacementDebug> placements;
};

}  // namespace pedsynth
