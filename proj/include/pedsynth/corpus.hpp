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
#include <optional>
#include <string>
#include <vector>

#include "pedsynth/geometry.hpp"
#include "pedsynth/raster.hpp"

namespace pedsynth {

enum class Posture { standing, sitting, squatting, bending_over, lying_down };
enum class AssetSource { real_cutout, synthesized_pose };
enum class OccluderKind { car_front, car_rear, cube_obstacle };

std::string to_string(Posture p);
std::string to_string(AssetSource s);
std::string to_string(OccluderKind k);
Posture parse_posture(const std::string& s);
AssetSource parse_asset_source(const std::string& s);
OccluderKind parse_occluder_kind(const std::string& s);

// --- Manifest (metadata only; paths relative to the manifest directory) ---

struct AssetEntry {
  std::string id;
  std::string image;
  // Absent means the image file itself carries the mask in its alpha channel.
  std::optional<std::string> mask;
  Posture posture = Posture::standing;
  AssetSource source = AssetSource::real_cutout;

  friend bool operator==(const AssetEntry&, const AssetEntry&) = default;
};

struct OccluderEntry {
  OccluderKind kind = OccluderKind::car_front;
  // Exactly one of the two is present.
  std::optional<std::string> mask;
  std::vector<std::array<int, 2>> polygon;

  friend bool operator==(const OccluderEntry&, const OccluderEntry&) = default;
};

struct BackgroundEntry {
  std::string id;
  std::string image;
  std::vector<OccluderEntry> occluders;
  std::optional<std::string> freespace;

  friend bool operator==(const BackgroundEntry&, const BackgroundEntry&) =
      default;
};

struct CorpusManifest {
  int schema_version = 1;
  std::uint64_t master_seed = 0;
  std::vector<AssetEntry> assets;
  std::vector<BackgroundEntry> backgrounds;
  // Directory the relative paths resolve against; set by load_manifest,
  // not serialized.
  std::filesystem::path base_dir;

  friend bool operator==(const CorpusManifest& a, const CorpusManifest& b) {
    return a.schema_version == b.schema_version &&
           a.master_seed == b.master_seed && a.assets == b.assets &&
           a.backgrounds == b.backgrounds;
  }
};

// Parses and validates eagerly: unique ids, referenced files exist, polygons
// have >= 3 vertices, vocabulary fields parse. Throws ManifestError.
CorpusManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const CorpusManifest& manifest,
                   const std::filesystem::path& path);

// --- Loaded corpus (pixels in memory) ---

struct PedestrianAsset {
  std::string id;
  RasterImage pixels;
  BinaryMask mask;
  PixelBox tight;  // minimal box around the set mask bits
  Posture posture;
  AssetSource source;
};

struct OccluderRegion {
  OccluderKind kind;
  BinaryMask mask;  // background-sized
  PixelBox box;     // tight box of the mask
};

struct SceneBackground {
  std::string id;
  RasterImage pixels;
  std::vector<OccluderRegion> occluders;
  std::optional<BinaryMask> freespace;
};

struct Corpus {
  std::uint64_t master_seed = 0;
  std::vector<PedestrianAsset> assets;
  std::vector<SceneBackground> backgrounds;
};

// Loads every referenced image and enforces the pixel-level invariants
// (nonempty asset masks, occluder masks matching background dimensions, ...).
Corpus load_corpus(const CorpusManifest& manifest);

// Even-odd scanline fill sampled at pixel centers.
BinaryMask rasterize_polygon(const std::vector<std::array<int, 2>>& vertices,
                             int width, int height);

}  // namespace pedsynth
