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

// Strict-IoU single-class detection scoring: AP and AR at one IoU threshold
// (0.75 by default) with greedy score-ordered matching and all-point
// precision-envelope interpolation.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pedsynth/annotate.hpp"
#include "pedsynth/geometry.hpp"

namespace pedsynth {

struct Detection {
  std::int64_t image_id = 0;
  PixelBox box;
  double score = 0.0;  // finite, in [0, 1]
};

struct GroundTruthItem {
  std::int64_t image_id = 0;
  PixelBox box;
  int bucket = 0;
};

// Flattens a label set into evaluator ground truths.
std::vector<GroundTruthItem> ground_truths_from(const LabelSet& set);

// Greedy matching for one image: detections processed in descending score
// (stable on ties), each taking the unmatched ground truth of highest
// IoU >= threshold, ties broken by lower ground-truth index. `order` holds
// indices into `dets`, already score-sorted and capped. Returns, per entry
// of `order`, the matched index into `gts` or -1.
std::vector<int> match_image(const std::vector<Detection>& dets,
                             const std::vector<int>& order,
                             const std::vector<GroundTruthItem>& gts,
                             const std::vector<int>& gt_indices,
                             double iou_threshold);

struct BucketReport {
  int bucket = 0;
  double ap = 0.0;
  double ar = 0.0;
  std::int64_t num_gt = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

struct EvalReport {
  double iou_threshold = 0.75;
  int max_dets = 100;
  double ap = 0.0;
  double ar = 0.0;
  std::int64_t num_gt = 0;
  std::int64_t num_images = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  // Buckets with no ground truth are omitted (their metrics are undefined).
  std::vector<BucketReport> buckets;
};

// Scores detections against ground truths. The per-image max_dets cap is
// applied before matching (highest scores kept) and therefore affects both
// AP and AR. Throws MetricError when there is no ground truth at all;
// ValidationError on out-of-range scores or thresholds.
EvalReport evaluate(const std::vector<Detection>& dets,
                    const std::vector<GroundTruthItem>& gts,
                    double iou_threshold = 0.75, int max_dets = 100);

// JSON array of {"image_id": int, "bbox": [x, y, w, h], "score": real}.
std::vector<Detection> read_detections_json(
    const std::filesystem::path& path);

void write_report_json(const EvalReport& report,
                       const std::filesystem::path& path);
std::string report_table(const EvalReport& report);

}  // namespace pedsynth
