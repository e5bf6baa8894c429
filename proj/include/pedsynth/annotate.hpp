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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedsynth/corpus.hpp"
#include "pedsynth/geometry.hpp"

namespace pedsynth {

enum class Generator { oda, pda, manual };

std::string to_string(Generator g);
Generator parse_generator(const std::string& s);

struct Provenance {
  std::string asset_id;
  std::string background_id;
  std::optional<int> occluder_index;
  std::uint64_t seed = 0;
  std::int64_t record_index = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Single-category ("pedestrian") ground-truth record for one pasted asset.
struct PseudoLabel {
  PixelBox box;
  OcclusionBucket bucket;
  std::optional<Posture> posture;
  std::optional<OccluderKind> occluder_kind;
  Generator generator = Generator::manual;
  Provenance provenance;

  friend bool operator==(const PseudoLabel&, const PseudoLabel&) = default;
};

// --- Occluded-box size estimator ---

inline constexpr double kHumanHeightMeters = 1.7;
inline constexpr double kHumanWidthMeters = 0.3;

struct OccludedBoxEstimate {
  double width_m = 0.0;   // W_o
  double height_m = 0.0;  // H_o
  double depth_m = 0.0;   // D_o
  double depth_max_m = 0.0;
  double human_height_m = kHumanHeightMeters;
  double human_width_m = kHumanWidthMeters;
};

// W_o = W_p * (1 - D_o / D_max), H_o = H_p * (1 - D_o / D_max).
// Throws ValidationError unless D_max > 0 and 0 <= D_o <= D_max.
OccludedBoxEstimate estimate_occluded_box(
    double depth_m, double depth_max_m,
    double human_height_m = kHumanHeightMeters,
    double human_width_m = kHumanWidthMeters);

// Meters -> pixels, both dimensions rounded half-up.
struct PixelSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const PixelSize&, const PixelSize&) = default;
};
PixelSize to_pixels(const OccludedBoxEstimate& est, double pixels_per_meter);

// --- 5:3:2 split ---

enum class Split { train, val, test };
std::string to_string(Split s);

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> val;
  std::vector<std::int64_t> test;

  std::optional<Split> find(std::int64_t id) const;
};

// Seeded shuffle (stream label "split"), then contiguous slices at
// floor(0.5*n) and floor(0.8*n). Ids must be unique.
SplitAssignment split_records(const std::vector<std::int64_t>& ids,
                              std::uint64_t seed);

std::string split_to_json(const SplitAssignment& split);
void write_split_json(const SplitAssignment& split,
                      const std::filesystem::path& path);
SplitAssignment read_split_json(const std::filesystem::path& path);

// --- Label files (COCO-style images/annotations/categories layout) ---

struct LabeledImage {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::int64_t record_index = 0;
  std::string background_id;
  std::uint64_t seed = 0;
  Generator generator = Generator::manual;

  friend bool operator==(const LabeledImage&, const LabeledImage&) = default;
};

struct Annotation {
  std::int64_t image_id = 0;
  PseudoLabel label;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct LabelSet {
  std::vector<LabeledImage> images;
  std::vector<Annotation> annotations;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

// Boxes are serialized as "bbox": [x, y, width, height]; with the exclusive
// x2/y2 convention, width = x2-x1 exactly. Artifact-specific fields live
// under the "pedsynth" key. Writes are atomic (temp file + rename).
void write_labels_json(const LabelSet& set, const std::filesystem::path& path);
LabelSet read_labels_json(const std::filesystem::path& path);

// --- Corpus statistics ---

struct StatsTable {
  std::int64_t images = 0;
  std::int64_t labels = 0;
  std::map<std::string, std::int64_t> by_generator;
  std::map<std::string, std::int64_t> by_occluder_kind;
  std::map<std::string, std::int64_t> by_posture;
  std::array<std::int64_t, 10> by_bucket{};
  // Present only when a split assignment is supplied.
  std::map<std::string, std::int64_t> split_images;
  std::map<std::string, std::int64_t> split_labels;
};

StatsTable compute_stats(const LabelSet& set,
                         const SplitAssignment* split = nullptr);
std::string format_stats_table(const StatsTable& table);
std::string stats_to_json(const StatsTable& table);

}  // namespace pedsynth
