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

#include "pedsynth/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "json.hpp"
#include "pedsynth/errors.hpp"
#include "pedsynth/fileio.hpp"
#include "pedsynth/png_io.hpp"

namespace pedsynth {

namespace {

using json = nlohmann::ordered_json;

}  // namespace

std::string to_string(Posture p) {
  switch (p) {
    case Posture::standing:
      return "standing";
    case Posture::sitting:
      return "sitting";
    case Posture::squatting:
      return "squatting";
    case Posture::bending_over:
      return "bending_over";
    case Posture::lying_down:
      return "lying_down";
  }
  throw ValidationError("invalid Posture value");
}

std::string to_string(AssetSource s) {
  switch (s) {
    case AssetSource::real_cutout:
      return "real_cutout";
    case AssetSource::synthesized_pose:
      return "synthesized_pose";
  }
  throw ValidationError("invalid AssetSource value");
}

std::string to_string(OccluderKind k) {
  switch (k) {
    case OccluderKind::car_front:
      return "car_front";
    case OccluderKind::car_rear:
      return "car_rear";
    case OccluderKind::cube_obstacle:
      return "cube_obstacle";
  }
  throw ValidationError("invalid OccluderKind value");
}

Posture parse_posture(const std::string& s) {
  if (s == "standing") return Posture::standing;
  if (s == "sitting") return Posture::sitting;
  if (s == "squatting") return Posture::squatting;
  if (s == "bending_over") return Posture::bending_over;
  if (s == "lying_down") return Posture::lying_down;
  throw ValidationError("unknown posture: " + s);
}

AssetSource parse_asset_source(const std::string& s) {
  if (s == "real_cutout") return AssetSource::real_cutout;
  if (s == "synthesized_pose") return AssetSource::synthesized_pose;
  throw ValidationError("unknown asset source: " + s);
}

OccluderKind parse_occluder_kind(const std::string& s) {
  if (s == "car_front") return OccluderKind::car_front;
  if (s == "car_rear") return OccluderKind::car_rear;
  if (s == "cube_obstacle") return OccluderKind::cube_obstacle;
  throw ValidationError("unknown occluder kind: " + s);
}

namespace {

const json& require_key(const json& obj, const char* key,
                        const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ManifestError(where + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  const json& v = require_key(obj, key, where);
  if (!v.is_string()) {
    throw ManifestError(where + ": key \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

void require_file(const std::filesystem::path& base, const std::string& rel,
                  const std::string& where) {
  const auto full = base / rel;
  if (!std::filesystem::is_regular_file(full)) {
    throw ManifestError(where + ": referenced file does not exist: " +
                        full.string());
  }
}

OccluderEntry parse_occluder(const json& j, const std::string& where,
                             const std::filesystem::path& base) {
  if (!j.is_object()) {
    throw ManifestError(where + ": occluder entries must be objects");
  }
  OccluderEntry entry;
  try {
    entry.kind = parse_occluder_kind(require_string(j, "kind", where));
  } catch (const ValidationError& e) {
    throw ManifestError(where + ": " + e.what());
  }
  const bool has_mask = j.contains("mask");
  const bool has_polygon = j.contains("polygon");
  if (has_mask == has_polygon) {
    throw ManifestError(where +
                        ": exactly one of \"mask\" or \"polygon\" required");
  }
  if (has_mask) {
    entry.mask = require_string(j, "mask", where);
    require_file(base, *entry.mask, where);
    return entry;
  }
  const json& poly = j["polygon"];
  if (!poly.is_array() || poly.size() < 3) {
    throw ManifestError(where + ": polygon needs at least 3 vertices");
  }
  for (const json& v : poly) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer()) {
      throw ManifestError(where + ": polygon vertices must be [x, y] integer "
                          "pairs");
    }
    entry.polygon.push_back({v[0].get<int>(), v[1].get<int>()});
  }
  return entry;
}

}  // namespace

CorpusManifest load_manifest(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ManifestError("manifest is not valid JSON: " + path.string() + ": " +
                        e.what());
  }
  if (!doc.is_object()) {
    throw ManifestError("manifest root must be a JSON object");
  }

  CorpusManifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path()
                                      : std::filesystem::path(".");

  const json& version = require_key(doc, "schema_version", "manifest");
  if (!version.is_number_integer()) {
    throw ManifestError("manifest: schema_version must be an integer");
  }
  m.schema_version = version.get<int>();
  if (m.schema_version != 1) {
    throw ManifestError("manifest: unsupported schema_version " +
                        std::to_string(m.schema_version));
  }

  const json& seed = require_key(doc, "master_seed", "manifest");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ManifestError("manifest: master_seed must be a non-negative "
                        "integer");
  }
  if (seed.is_number_integer() && !seed.is_number_unsigned() &&
      seed.get<std::int64_t>() < 0) {
    throw ManifestError("manifest: master_seed must be a non-negative "
                        "integer");
  }
  m.master_seed = seed.get<std::uint64_t>();

  const json& assets = require_key(doc, "assets", "manifest");
  if (!assets.is_array()) {
    throw ManifestError("manifest: assets must be an array");
  }
  std::set<std::string> asset_ids;
  for (const json& a : assets) {
    if (!a.is_object()) {
      throw ManifestError("manifest: asset entries must be objects");
    }
    AssetEntry entry;
    entry.id = require_string(a, "id", "asset");
    const std::string where = "asset \"" + entry.id + "\"";
    if (!asset_ids.insert(entry.id).second) {
      throw ManifestError("duplicate asset id: " + entry.id);
    }
    entry.image = require_string(a, "image", where);
    require_file(m.base_dir, entry.image, where);
    if (a.contains("mask")) {
      entry.mask = require_string(a, "mask", where);
      require_file(m.base_dir, *entry.mask, where);
    }
    try {
      entry.posture = parse_posture(require_string(a, "posture", where));
      entry.source = parse_asset_source(require_string(a, "source", where));
    } catch (const ValidationError& e) {
      throw ManifestError(where + ": " + e.what());
    }
    m.assets.push_back(std::move(entry));
  }

  const json& backgrounds = require_key(doc, "backgrounds", "manifest");
  if (!backgrounds.is_array()) {
    throw ManifestError("manifest: backgrounds must be an array");
  }
  std::set<std::string> background_ids;
  for (const json& b : backgrounds) {
    if (!b.is_object()) {
      throw ManifestError("manifest: background entries must be objects");
    }
    BackgroundEntry entry;
    entry.id = require_string(b, "id", "background");
    const std::string where = "background \"" + entry.id + "\"";
    if (!background_ids.insert(entry.id).second) {
      throw ManifestError("duplicate background id: " + entry.id);
    }
    entry.image = require_string(b, "image", where);
    require_file(m.base_dir, entry.image, where);
    if (b.contains("occluders")) {
      const json& occs = b["occluders"];
      if (!occs.is_array()) {
        throw ManifestError(where + ": occluders must be an array");
      }
      for (std::size_t i = 0; i < occs.size(); ++i) {
        entry.occluders.push_back(parse_occluder(
            occs[i], where + " occluder " + std::to_string(i), m.base_dir));
      }
    }
    if (b.contains("freespace")) {
      entry.freespace = require_string(b, "freespace", where);
      require_file(m.base_dir, *entry.freespace, where);
    }
    m.backgrounds.push_back(std::move(entry));
  }

  return m;
}

void save_manifest(const CorpusManifest& manifest,
                   const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = manifest.schema_version;
  doc["master_seed"] = manifest.master_seed;
  doc["assets"] = json::array();
  for (const AssetEntry& a : manifest.assets) {
    json entry;
    entry["id"] = a.id;
    entry["image"] = a.image;
    if (a.mask) {
      entry["mask"] = *a.mask;
    }
    entry["posture"] = to_string(a.posture);
    entry["source"] = to_string(a.source);
    doc["assets"].push_back(std::move(entry));
  }
  doc["backgrounds"] = json::array();
  for (const BackgroundEntry& b : manifest.backgrounds) {
    json entry;
    entry["id"] = b.id;
    entry["image"] = b.image;
    if (!b.occluders.empty()) {
      entry["occluders"] = json::array();
      for (const OccluderEntry& o : b.occluders) {
        json occ;
        occ["kind"] = to_string(o.kind);
        if (o.mask) {
          occ["mask"] = *o.mask;
        } else {
          json poly = json::array();
          for (const auto& v : o.polygon) {
            poly.push_back({v[0], v[1]});
          }
          occ["polygon"] = std::move(poly);
        }
        entry["occluders"].push_back(std::move(occ));
      }
    }
    if (b.freespace) {
      entry["freespace"] = *b.freespace;
    }
    doc["backgrounds"].push_back(std::move(entry));
  }
  atomic_write_text(path, doc.dump(2) + "\n");
}

BinaryMask rasterize_polygon(const std::vector<std::array<int, 2>>& vertices,
                             int width, int height) {
  if (vertices.size() < 3) {
    throw ValidationError("rasterize_polygon: need at least 3 vertices");
  }
  BinaryMask out(width, height);
  const std::size_t n = vertices.size();
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    // Sampling at half-integer rows means a scanline never passes exactly
    // through an integer vertex, so the half-open edge test below is
    // unambiguous.
    const double py = y + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = vertices[i];
      const auto& b = vertices[(i + 1) % n];
      const double ay = a[1];
      const double by = b[1];
      if ((ay <= py && py < by) || (by <= py && py < ay)) {
        const double t = (py - ay) / (by - ay);
        xs.push_back(a[0] + t * (b[0] - a[0]));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int first = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int last =
          std::min(width - 1, static_cast<int>(std::floor(xs[i + 1] - 0.5)));
      for (int x = first; x <= last; ++x) {
        // Strictly interior pixel centers only; centers exactly on an edge
        // stay unset.
        if (xs[i] < x + 0.5 && x + 0.5 < xs[i + 1]) {
          out.set(x, y);
        }
      }
    }
  }
  return out;
}

namespace {

BinaryMask load_occluder_mask(const OccluderEntry& entry,
                              const std::filesystem::path& base, int bg_w,
                              int bg_h, const std::string& where) {
  if (entry.mask) {
    BinaryMask mask = read_mask(base / *entry.mask);
    if (mask.width() != bg_w || mask.height() != bg_h) {
      throw ManifestError(where + ": occluder mask is " +
                          std::to_string(mask.width()) + "x" +
                          std::to_string(mask.height()) +
                          " but the background is " + std::to_string(bg_w) +
                          "x" + std::to_string(bg_h));
    }
    return mask;
  }
  return rasterize_polygon(entry.polygon, bg_w, bg_h);
}

}  // namespace

Corpus load_corpus(const CorpusManifest& manifest) {
  Corpus corpus;
  corpus.master_seed = manifest.master_seed;

  for (const AssetEntry& entry : manifest.assets) {
    const std::string where = "asset \"" + entry.id + "\"";
    DecodedPng decoded = read_png(manifest.base_dir / entry.image);
    BinaryMask mask(1, 1);
    if (entry.mask) {
      mask = read_mask(manifest.base_dir / *entry.mask);
    } else if (decoded.alpha_mask) {
      mask = std::move(*decoded.alpha_mask);
    } else {
      throw ManifestError(where + ": no mask file and the image has no alpha "
                          "channel");
    }
    if (mask.width() != decoded.rgb.width() ||
        mask.height() != decoded.rgb.height()) {
      throw ManifestError(where + ": mask dimensions do not match the image");
    }
    auto tight = tight_box(mask);
    if (!tight) {
      throw DegenerateAssetError(where + ": mask has no set pixels");
    }
    corpus.assets.push_back(PedestrianAsset{entry.id, std::move(decoded.rgb),
                                            std::move(mask), *tight,
                                            entry.posture, entry.source});
  }

  for (const BackgroundEntry& entry : manifest.backgrounds) {
    const std::string where = "background \"" + entry.id + "\"";
    RasterImage pixels = read_image_rgb(manifest.base_dir / entry.image);
    std::vector<OccluderRegion> occluders;
    for (std::size_t i = 0; i < entry.occluders.size(); ++i) {
      const std::string occ_where = where + " occluder " + std::to_string(i);
      BinaryMask mask =
          load_occluder_mask(entry.occluders[i], manifest.base_dir,
                             pixels.width(), pixels.height(), occ_where);
      auto box = tight_box(mask);
      if (!box) {
        throw DegenerateAssetError(occ_where + ": mask has no set pixels");
      }
      occluders.push_back(
          OccluderRegion{entry.occluders[i].kind, std::move(mask), *box});
    }
    std::optional<BinaryMask> freespace;
    if (entry.freespace) {
      BinaryMask loaded = read_mask(manifest.base_dir / *entry.freespace);
      if (loaded.width() != pixels.width() ||
          loaded.height() != pixels.height()) {
        throw ManifestError(where + ": freespace mask dimensions do not match "
                            "the background");
      }
      freespace = std::move(loaded);
    }
    corpus.backgrounds.push_back(SceneBackground{entry.id, std::move(pixels),
                                                 std::move(occluders),
                                                 std::move(freespace)});
  }

  return corpus;
}

}  // namespace pedsynth
