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

#include "pedsynth/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "pedsynth/errors.hpp"
#include "pedsynth/fileio.hpp"
#include "pedsynth/rng.hpp"

namespace pedsynth {

namespace {

using json = nlohmann::ordered_json;

}  // namespace

std::string to_string(Generator g) {
  switch (g) {
    case Generator::oda:
      return "ODA";
    case Generator::pda:
      return "PDA";
    case Generator::manual:
      return "manual";
  }
  throw ValidationError("invalid Generator value");
}

Generator parse_generator(const std::string& s) {
  if (s == "ODA") return Generator::oda;
  if (s == "PDA") return Generator::pda;
  if (s == "manual") return Generator::manual;
  throw ValidationError("unknown generator: " + s);
}

OccludedBoxEstimate estimate_occluded_box(double depth_m, double depth_max_m,
                                          double human_height_m,
                                          double human_width_m) {
  if (!(depth_max_m > 0.0)) {
    throw ValidationError("estimate_occluded_box: D_max must be positive");
  }
  if (!(depth_m >= 0.0) || depth_m > depth_max_m) {
    throw ValidationError(
        "estimate_occluded_box: D_o must lie in [0, D_max], got D_o=" +
        std::to_string(depth_m) + " D_max=" + std::to_string(depth_max_m));
  }
  if (!(human_height_m > 0.0) || !(human_width_m > 0.0)) {
    throw ValidationError(
        "estimate_occluded_box: H_p and W_p must be positive");
  }
  const double remaining = 1.0 - depth_m / depth_max_m;
  return OccludedBoxEstimate{human_width_m * remaining,
                             human_height_m * remaining,
                             depth_m,
                             depth_max_m,
                             human_height_m,
                             human_width_m};
}

PixelSize to_pixels(const OccludedBoxEstimate& est, double pixels_per_meter) {
  if (!(pixels_per_meter > 0.0)) {
    throw ValidationError("to_pixels: pixels_per_meter must be positive");
  }
  const auto half_up = [](double v) {
    return static_cast<int>(std::floor(v + 0.5));
  };
  return PixelSize{half_up(est.width_m * pixels_per_meter),
                   half_up(est.height_m * pixels_per_meter)};
}

std::string to_string(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test:
      return "test";
  }
  throw ValidationError("invalid Split value");
}

std::optional<Split> SplitAssignment::find(std::int64_t id) const {
  const auto has = [id](const std::vector<std::int64_t>& ids) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
  };
  if (has(train)) return Split::train;
  if (has(val)) return Split::val;
  if (has(test)) return Split::test;
  return std::nullopt;
}

SplitAssignment split_records(const std::vector<std::int64_t>& ids,
                              std::uint64_t seed) {
  std::set<std::int64_t> unique(ids.begin(), ids.end());
  if (unique.size() != ids.size()) {
    throw ValidationError("split_records: record ids must be unique");
  }
  std::vector<std::int64_t> shuffled = seeded_shuffle(ids, seed, "split");
  const std::int64_t n = static_cast<std::int64_t>(shuffled.size());
  const std::int64_t train_end = n / 2;        // floor(0.5 n)
  const std::int64_t val_end = (4 * n) / 5;    // floor(0.8 n)
  SplitAssignment out;
  out.seed = seed;
  out.train.assign(shuffled.begin(), shuffled.begin() + train_end);
  out.val.assign(shuffled.begin() + train_end, shuffled.begin() + val_end);
  out.test.assign(shuffled.begin() + val_end, shuffled.end());
  return out;
}

std::string split_to_json(const SplitAssignment& split) {
  json doc;
  doc["seed"] = split.seed;
  doc["train"] = split.train;
  doc["val"] = split.val;
  doc["test"] = split.test;
  return doc.dump(2) + "\n";
}

void write_split_json(const SplitAssignment& split,
                      const std::filesystem::path& path) {
  atomic_write_text(path, split_to_json(split));
}

namespace {

std::vector<std::int64_t> id_list(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw ValidationError(std::string("split JSON: missing id list \"") + key +
                          "\"");
  }
  std::vector<std::int64_t> out;
  for (const json& v : doc[key]) {
    if (!v.is_number_integer()) {
      throw ValidationError(std::string("split JSON: non-integer id under \"") +
                            key + "\"");
    }
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

}  // namespace

SplitAssignment read_split_json(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("split file is not valid JSON: " + path.string() +
                          ": " + e.what());
  }
  SplitAssignment out;
  if (doc.contains("seed")) {
    out.seed = doc["seed"].get<std::uint64_t>();
  }
  out.train = id_list(doc, "train");
  out.val = id_list(doc, "val");
  out.test = id_list(doc, "test");
  return out;
}

namespace {

json label_to_json(const Annotation& ann, std::int64_t ann_id) {
  const PseudoLabel& label = ann.label;
  json ext;
  ext["generator"] = to_string(label.generator);
  ext["bucket"] = label.bucket.index;
  if (label.posture) {
    ext["posture"] = to_string(*label.posture);
  }
  if (label.occluder_kind) {
    ext["occluder_kind"] = to_string(*label.occluder_kind);
  }
  ext["asset_id"] = label.provenance.asset_id;
  ext["background_id"] = label.provenance.background_id;
  if (label.provenance.occluder_index) {
    ext["occluder_index"] = *label.provenance.occluder_index;
  }
  ext["seed"] = label.provenance.seed;
  ext["record_index"] = label.provenance.record_index;

  json a;
  a["id"] = ann_id;
  a["image_id"] = ann.image_id;
  a["category_id"] = 1;
  a["bbox"] = {label.box.x1, label.box.y1, label.box.width(),
               label.box.height()};
  a["area"] = label.box.area();
  a["iscrowd"] = 0;
  a["pedsynth"] = std::move(ext);
  return a;
}

PixelBox bbox_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 4) {
    throw ValidationError(where + ": bbox must be [x, y, width, height]");
  }
  const int x = arr[0].get<int>();
  const int y = arr[1].get<int>();
  const int w = arr[2].get<int>();
  const int h = arr[3].get<int>();
  if (w < 1 || h < 1) {
    throw ValidationError(where + ": bbox width and height must be >= 1");
  }
  return PixelBox(x, y, x + w, y + h);
}

}  // namespace

void write_labels_json(const LabelSet& set,
                       const std::filesystem::path& path) {
  json doc;
  doc["images"] = json::array();
  for (const LabeledImage& img : set.images) {
    json j;
    j["id"] = img.id;
    j["file_name"] = img.file_name;
    j["width"] = img.width;
    j["height"] = img.height;
    json ext;
    ext["record_index"] = img.record_index;
    ext["background_id"] = img.background_id;
    ext["seed"] = img.seed;
    ext["generator"] = to_string(img.generator);
    j["pedsynth"] = std::move(ext);
    doc["images"].push_back(std::move(j));
  }
  doc["annotations"] = json::array();
  std::int64_t next_id = 1;
  for (const Annotation& ann : set.annotations) {
    doc["annotations"].push_back(label_to_json(ann, next_id++));
  }
  doc["categories"] = {{{"id", 1}, {"name", "pedestrian"}}};
  json meta;
  meta["schema_version"] = 1;
  meta["box_convention"] =
      "bbox is [x, y, width, height]; box edges x2 = x + width and "
      "y2 = y + height are exclusive";
  doc["pedsynth"] = std::move(meta);
  atomic_write_text(path, doc.dump(2) + "\n");
}

LabelSet read_labels_json(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("labels file is not valid JSON: " + path.string() +
                          ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("images") ||
      !doc.contains("annotations")) {
    throw ValidationError(
        "labels file must carry \"images\" and \"annotations\" arrays");
  }

  LabelSet set;
  std::map<std::int64_t, std::pair<int, int>> image_dims;
  for (const json& j : doc["images"]) {
    LabeledImage img;
    img.id = j.at("id").get<std::int64_t>();
    img.file_name = j.value("file_name", std::string());
    img.width = j.at("width").get<int>();
    img.height = j.at("height").get<int>();
    if (img.width < 1 || img.height < 1) {
      throw ValidationError("labels: image " + std::to_string(img.id) +
                            " has non-positive dimensions");
    }
    if (j.contains("pedsynth")) {
      const json& ext = j["pedsynth"];
      img.record_index = ext.value("record_index", std::int64_t{0});
      img.background_id = ext.value("background_id", std::string());
      img.seed = ext.value("seed", std::uint64_t{0});
      img.generator = parse_generator(ext.value("generator", "manual"));
    }
    if (!image_dims.emplace(img.id, std::make_pair(img.width, img.height))
             .second) {
      throw ValidationError("labels: duplicate image id " +
                            std::to_string(img.id));
    }
    set.images.push_back(std::move(img));
  }

  for (const json& j : doc["annotations"]) {
    const std::int64_t image_id = j.at("image_id").get<std::int64_t>();
    const auto dims = image_dims.find(image_id);
    if (dims == image_dims.end()) {
      throw ValidationError("labels: annotation references unknown image id " +
                            std::to_string(image_id));
    }
    const std::string where =
        "annotation for image " + std::to_string(image_id);
    const PixelBox box = bbox_from_json(j.at("bbox"), where);
    if (box.x1 < 0 || box.y1 < 0 || box.x2 > dims->second.first ||
        box.y2 > dims->second.second) {
      throw ValidationError(where + ": box outside image bounds");
    }

    int bucket_index = 0;
    std::optional<Posture> posture;
    std::optional<OccluderKind> kind;
    Generator generator = Generator::manual;
    Provenance prov;
    if (j.contains("pedsynth")) {
      const json& ext = j["pedsynth"];
      bucket_index = ext.value("bucket", 0);
      if (ext.contains("posture")) {
        posture = parse_posture(ext["posture"].get<std::string>());
      }
      if (ext.contains("occluder_kind")) {
        kind = parse_occluder_kind(ext["occluder_kind"].get<std::string>());
      }
      generator = parse_generator(ext.value("generator", "manual"));
      prov.asset_id = ext.value("asset_id", std::string());
      prov.background_id = ext.value("background_id", std::string());
      if (ext.contains("occluder_index")) {
        prov.occluder_index = ext["occluder_index"].get<int>();
      }
      prov.seed = ext.value("seed", std::uint64_t{0});
      prov.record_index = ext.value("record_index", std::int64_t{0});
    }
    set.annotations.push_back(Annotation{
        image_id, PseudoLabel{box, OcclusionBucket(bucket_index), posture,
                              kind, generator, std::move(prov)}});
  }
  return set;
}

StatsTable compute_stats(const LabelSet& set, const SplitAssignment* split) {
  StatsTable table;
  table.images = static_cast<std::int64_t>(set.images.size());
  table.labels = static_cast<std::int64_t>(set.annotations.size());

  std::map<std::int64_t, std::int64_t> labels_per_image;
  for (const Annotation& ann : set.annotations) {
    const PseudoLabel& label = ann.label;
    ++table.by_generator[to_string(label.generator)];
    if (label.occluder_kind) {
      ++table.by_occluder_kind[to_string(*label.occluder_kind)];
    }
    if (label.posture) {
      ++table.by_posture[to_string(*label.posture)];
    }
    ++table.by_bucket[static_cast<std::size_t>(label.bucket.index)];
    ++labels_per_image[ann.image_id];
  }

  if (split != nullptr) {
    for (const LabeledImage& img : set.images) {
      const auto assignment = split->find(img.id);
      const std::string key =
          assignment ? to_string(*assignment) : std::string("unassigned");
      ++table.split_images[key];
      table.split_labels[key] += labels_per_image[img.id];
    }
  }
  return table;
}

namespace {

void append_rows(std::ostringstream& out, const std::string& heading,
                 const std::map<std::string, std::int64_t>& rows) {
  out << heading << "\n";
  if (rows.empty()) {
    out << "  (none)\n";
    return;
  }
  for (const auto& [name, count] : rows) {
    out << "  " << name;
    for (std::size_t i = name.size(); i < 20; ++i) {
      out << ' ';
    }
    out << count << "\n";
  }
}

}  // namespace

std::string format_stats_table(const StatsTable& table) {
  std::ostringstream out;
  out << "images              " << table.images << "\n";
  out << "pedestrians         " << table.labels << "\n";
  append_rows(out, "by generator", table.by_generator);
  append_rows(out, "by occluder kind", table.by_occluder_kind);
  append_rows(out, "by posture", table.by_posture);
  out << "by occlusion bucket\n";
  for (int b = 0; b < 10; ++b) {
    out << "  bucket " << b << " (>=" << 10 * b << "%)   "
        << table.by_bucket[static_cast<std::size_t>(b)] << "\n";
  }
  if (!table.split_images.empty()) {
    append_rows(out, "split images", table.split_images);
    append_rows(out, "split pedestrians", table.split_labels);
  }
  return std::move(out).str();
}

std::string stats_to_json(const StatsTable& table) {
  json doc;
  doc["images"] = table.images;
  doc["pedestrians"] = table.labels;
  doc["by_generator"] = table.by_generator;
  doc["by_occluder_kind"] = table.by_occluder_kind;
  doc["by_posture"] = table.by_posture;
  doc["by_bucket"] = table.by_bucket;
  if (!table.split_images.empty()) {
    doc["split_images"] = table.split_images;
    doc["split_pedestrians"] = table.split_labels;
  }
  return doc.dump(2) + "\n";
}

}  // namespace pedsynth
