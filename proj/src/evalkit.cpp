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

#include "pedsynth/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "pedsynth/errors.hpp"
#include "pedsynth/fileio.hpp"

namespace pedsynth {

namespace {

using json = nlohmann::ordered_json;

}  // namespace

std::vector<GroundTruthItem> ground_truths_from(const LabelSet& set) {
  std::vector<GroundTruthItem> out;
  out.reserve(set.annotations.size());
  for (const Annotation& ann : set.annotations) {
    out.push_back(GroundTruthItem{ann.image_id, ann.label.box,
                                  ann.label.bucket.index});
  }
  return out;
}

std::vector<int> match_image(const std::vector<Detection>& dets,
                             const std::vector<int>& order,
                             const std::vector<GroundTruthItem>& gts,
                             const std::vector<int>& gt_indices,
                             double iou_threshold) {
  std::vector<int> matches(order.size(), -1);
  std::vector<char> taken(gt_indices.size(), 0);
  for (std::size_t d = 0; d < order.size(); ++d) {
    const PixelBox& det_box = dets[static_cast<std::size_t>(order[d])].box;
    double best = 0.0;
    int best_slot = -1;
    for (std::size_t g = 0; g < gt_indices.size(); ++g) {
      if (taken[g]) {
        continue;
      }
      const double overlap =
          iou(det_box, gts[static_cast<std::size_t>(gt_indices[g])].box);
      // Strict > keeps the first (lowest-index) ground truth on ties.
      if (overlap >= iou_threshold && overlap > best) {
        best = overlap;
        best_slot = static_cast<int>(g);
      }
    }
    if (best_slot >= 0) {
      taken[static_cast<std::size_t>(best_slot)] = 1;
      matches[d] = gt_indices[static_cast<std::size_t>(best_slot)];
    }
  }
  return matches;
}

namespace {

struct PooledDetection {
  double score;
  std::int64_t image_id;
  int det_index;
  bool is_tp;
};

struct PoolMetrics {
  double ap = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
};

// All-point interpolated AP: area under the precision envelope, detections
// pooled globally in descending score order.
PoolMetrics pool_metrics(std::vector<PooledDetection> pool,
                         std::int64_t num_gt) {
  std::sort(pool.begin(), pool.end(),
            [](const PooledDetection& a, const PooledDetection& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.det_index < b.det_index;
            });
  PoolMetrics out;
  std::vector<double> precision(pool.size());
  std::vector<double> recall(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.tp += pool[i].is_tp ? 1 : 0;
    out.fp += pool[i].is_tp ? 0 : 1;
    recall[i] = static_cast<double>(out.tp) / static_cast<double>(num_gt);
    precision[i] =
        static_cast<double>(out.tp) / static_cast<double>(out.tp + out.fp);
  }
  for (std::size_t i = pool.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    out.ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return out;
}

// Matches every image and pools the outcome for one ground-truth subset.
PoolMetrics score_subset(
    const std::vector<Detection>& dets,
    const std::map<std::int64_t, std::vector<int>>& det_order_by_image,
    const std::vector<GroundTruthItem>& gts,
    const std::map<std::int64_t, std::vector<int>>& gt_by_image,
    double iou_threshold, std::int64_t num_gt) {
  std::vector<PooledDetection> pool;
  static const std::vector<int> kNoGts;
  for (const auto& [image_id, order] : det_order_by_image) {
    const auto gt_it = gt_by_image.find(image_id);
    const std::vector<int>& gt_indices =
        gt_it == gt_by_image.end() ? kNoGts : gt_it->second;
    const std::vector<int> matches =
        match_image(dets, order, gts, gt_indices, iou_threshold);
    for (std::size_t d = 0; d < order.size(); ++d) {
      pool.push_back(PooledDetection{
          dets[static_cast<std::size_t>(order[d])].score, image_id, order[d],
          matches[d] >= 0});
    }
  }
  return pool_metrics(std::move(pool), num_gt);
}

}  // namespace

EvalReport evaluate(const std::vector<Detection>& dets,
                    const std::vector<GroundTruthItem>& gts,
                    double iou_threshold, int max_dets) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("evaluate: IoU threshold must lie in (0, 1]");
  }
  if (max_dets < 1) {
    throw ValidationError("evaluate: max_dets must be >= 1");
  }
  for (const Detection& det : dets) {
    if (!std::isfinite(det.score) || det.score < 0.0 || det.score > 1.0) {
      throw ValidationError("evaluate: detection score outside [0, 1]");
    }
  }
  if (gts.empty()) {
    throw MetricError("evaluate: no ground truth; metrics are undefined");
  }

  // Score-sort and cap detections per image once; every subset evaluation
  // reuses this order.
  std::map<std::int64_t, std::vector<int>> det_order_by_image;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    det_order_by_image[dets[i].image_id].push_back(static_cast<int>(i));
  }
  for (auto& [image_id, order] : det_order_by_image) {
    std::stable_sort(order.begin(), order.end(), [&dets](int a, int b) {
      return dets[static_cast<std::size_t>(a)].score >
             dets[static_cast<std::size_t>(b)].score;
    });
    if (order.size() > static_cast<std::size_t>(max_dets)) {
      order.resize(static_cast<std::size_t>(max_dets));
    }
  }

  std::map<std::int64_t, std::vector<int>> gt_by_image;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    gt_by_image[gts[i].image_id].push_back(static_cast<int>(i));
  }

  std::set<std::int64_t> images;
  for (const auto& [image_id, order] : det_order_by_image) {
    images.insert(image_id);
  }
  for (const auto& [image_id, indices] : gt_by_image) {
    images.insert(image_id);
  }

  EvalReport report;
  report.iou_threshold = iou_threshold;
  report.max_dets = max_dets;
  report.num_gt = static_cast<std::int64_t>(gts.size());
  report.num_images = static_cast<std::int64_t>(images.size());

  const PoolMetrics overall =
      score_subset(dets, det_order_by_image, gts, gt_by_image, iou_threshold,
                   report.num_gt);
  report.ap = overall.ap;
  report.tp = overall.tp;
  report.fp = overall.fp;
  report.fn = report.num_gt - overall.tp;
  report.ar = static_cast<double>(overall.tp) /
              static_cast<double>(report.num_gt);

  for (int bucket = 0; bucket < 10; ++bucket) {
    std::map<std::int64_t, std::vector<int>> bucket_gts;
    std::int64_t bucket_count = 0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      if (gts[i].bucket == bucket) {
        bucket_gts[gts[i].image_id].push_back(static_cast<int>(i));
        ++bucket_count;
      }
    }
    if (bucket_count == 0) {
      continue;
    }
    const PoolMetrics metrics =
        score_subset(dets, det_order_by_image, gts, bucket_gts, iou_threshold,
                     bucket_count);
    BucketReport row;
    row.bucket = bucket;
    row.num_gt = bucket_count;
    row.ap = metrics.ap;
    row.tp = metrics.tp;
    row.fp = metrics.fp;
    row.fn = bucket_count - metrics.tp;
    row.ar = static_cast<double>(metrics.tp) /
             static_cast<double>(bucket_count);
    report.buckets.push_back(row);
  }
  return report;
}

std::vector<Detection> read_detections_json(
    const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("detections file is not valid JSON: " +
                          path.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw ValidationError("detections file must hold a JSON array");
  }
  const auto half_up = [](double v) {
    return static_cast<int>(std::floor(v + 0.5));
  };
  std::vector<Detection> out;
  for (const json& j : doc) {
    if (!j.is_object() || !j.contains("image_id") || !j.contains("bbox") ||
        !j.contains("score")) {
      throw ValidationError(
          "detections: each entry needs image_id, bbox and score");
    }
    const json& bbox = j["bbox"];
    if (!bbox.is_array() || bbox.size() != 4) {
      throw ValidationError("detections: bbox must be [x, y, width, height]");
    }
    // Fractional boxes are rounded half-up onto the pixel grid.
    const int x = half_up(bbox[0].get<double>());
    const int y = half_up(bbox[1].get<double>());
    const int w = half_up(bbox[2].get<double>());
    const int h = half_up(bbox[3].get<double>());
    if (w < 1 || h < 1) {
      throw ValidationError(
          "detections: bbox width and height must round to >= 1");
    }
    const double score = j["score"].get<double>();
    if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
      throw ValidationError("detections: score must lie in [0, 1]");
    }
    out.push_back(Detection{j["image_id"].get<std::int64_t>(),
                            PixelBox(x, y, x + w, y + h), score});
  }
  return out;
}

void write_report_json(const EvalReport& report,
                       const std::filesystem::path& path) {
  json doc;
  doc["iou_threshold"] = report.iou_threshold;
  doc["max_dets"] = report.max_dets;
  doc["ap"] = report.ap;
  doc["ar"] = report.ar;
  doc["num_gt"] = report.num_gt;
  doc["num_images"] = report.num_images;
  doc["tp"] = report.tp;
  doc["fp"] = report.fp;
  doc["fn"] = report.fn;
  doc["buckets"] = json::array();
  for (const BucketReport& row : report.buckets) {
    json b;
    b["bucket"] = row.bucket;
    b["ap"] = row.ap;
    b["ar"] = row.ar;
    b["num_gt"] = row.num_gt;
    b["tp"] = row.tp;
    b["fp"] = row.fp;
    b["fn"] = row.fn;
    doc["buckets"].push_back(std::move(b));
  }
  atomic_write_text(path, doc.dump(2) + "\n");
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "IoU threshold   " << report.iou_threshold << "\n";
  out << "max dets        " << report.max_dets << "\n";
  out << "AP              " << report.ap << "\n";
  out << "AR              " << report.ar << "\n";
  out << "TP / FP / FN    " << report.tp << " / " << report.fp << " / "
      << report.fn << "\n";
  out << "ground truths   " << report.num_gt << "\n";
  out << "images          " << report.num_images << "\n";
  if (!report.buckets.empty()) {
    out << "bucket   num_gt       AP       AR\n";
    for (const BucketReport& row : report.buckets) {
      out << std::setw(6) << row.bucket << std::setw(9) << row.num_gt
          << std::setw(9) << row.ap << std::setw(9) << row.ar << "\n";
    }
  }
  return std::move(out).str();
}

}  // namespace pedsynth
