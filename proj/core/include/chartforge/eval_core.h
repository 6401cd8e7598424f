// Copyright 2026 The Chartforge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHARTFORGE_EVAL_CORE_H_
#define CHARTFORGE_EVAL_CORE_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/bitmap.h"
#include "chartforge/mask_forge.h"
#include "chartforge/taxonomy.h"

namespace chartforge {

// rows = predictions, cols = ground truth.
using ScoreMatrix = std::vector<std::vector<double>>;
using EligibilityMatrix = std::vector<std::vector<bool>>;

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (pred, gt), ascending pred
  // Scores of eligible cells; ineligible cells hold NaN.
  ScoreMatrix score_matrix;
  double total_score = 0.0;
};

// Maximum-cardinality matching over eligible pairs; among those, maximum
// total score. Throws kShapeMismatch.
Matching hungarian_match(const ScoreMatrix& scores, const EligibilityMatrix& eligible);

struct SampleMetrics {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const SampleMetrics&, const SampleMetrics&) = default;
};

// Empty predictions score P = R = F1 = 0.
SampleMetrics make_metrics(int64_t tp, int64_t num_preds, int64_t num_gts);

inline constexpr double kPointRadiusPx = 5.0;
inline constexpr double kMatchThreshold = 0.5;
inline constexpr std::array<int, 4> kBoundaryDistances = {1, 2, 4, 8};

// Pixel (x, y) covers [x, x+1) x [y, y+1). 0 when the point lies in a
// foreground pixel, else the distance to the nearest foreground pixel center.
double point_mask_distance(const Point& p, const Bitmap& mask);

SampleMetrics eval_points(const std::vector<Point>& preds, const std::vector<Bitmap>& gts,
                          double radius_px = kPointRadiusPx);

double box_iou(const BBox& a, const BBox& b);

SampleMetrics eval_boxes(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                         double iou_thr = kMatchThreshold);

double mask_iou(const Bitmap& a, const Bitmap& b);

// Band of width d: the mask minus its erosion by a (2d+1) square, with
// everything outside the image treated as background.
Bitmap boundary_band(const Bitmap& mask, int d);
double boundary_iou(const Bitmap& a, const Bitmap& b,
                    const std::vector<int>& d_set = {kBoundaryDistances.begin(),
                                                     kBoundaryDistances.end()});

enum class SimilarityKind { kMaskIou, kBoundaryIou };

SimilarityKind mask_similarity_kind(ElementCategory category);

struct MaskEvaluation {
  SampleMetrics metrics;
  SimilarityKind similarity = SimilarityKind::kMaskIou;
  Matching matching;
};

MaskEvaluation eval_masks_detailed(const std::vector<Bitmap>& preds,
                                   const std::vector<Bitmap>& gts, ElementCategory category,
                                   double thr = kMatchThreshold);
SampleMetrics eval_masks(const std::vector<Bitmap>& preds, const std::vector<Bitmap>& gts,
                         ElementCategory category, double thr = kMatchThreshold);

// IoU of the prediction union against the ground-truth union. Throws
// kEmptyInput when there is no ground truth.
double miou_union(const std::vector<Bitmap>& preds, const std::vector<Bitmap>& gts);

struct MetricReport {
  double macro_p = 0.0;
  double macro_r = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> miou_union;
  std::vector<SampleMetrics> per_sample;
  std::vector<double> per_sample_miou;
  std::vector<std::string> sample_ids;
};

// `miou_values` is empty or aligned with `per_sample`. Throws kEmptyInput and
// kLengthMismatch.
MetricReport macro_aggregate(const std::vector<SampleMetrics>& per_sample,
                             const std::vector<double>& miou_values);

nlohmann::json metrics_to_json(const SampleMetrics& m);
nlohmann::json report_to_json(const MetricReport& r);

struct CocoInstance {
  std::string image_id;
  ElementCategory category = ElementCategory::kVBar;
  Bitmap mask;
  double confidence = 1.0;
};

struct MapReport {
  double map = -1.0;  // -1 when no category has ground truth
  double ap50 = -1.0;
  double ap75 = -1.0;
  double ap_small = -1.0;
  double ap_medium = -1.0;
  double ap_large = -1.0;
  std::map<std::string, double> per_category;
};

std::vector<double> default_iou_thresholds();

inline constexpr int kMaxDetections = 100;

// Confidence-ranked greedy matching per image and category, 101-point
// interpolated precision. Categories without ground truth are left out.
// Throws kInvalidArgument for confidences outside [0, 1].
MapReport coco_map(const std::vector<CocoInstance>& preds,
                   const std::vector<CocoInstance>& gts,
                   const std::vector<double>& iou_thresholds = default_iou_thresholds());

nlohmann::json map_report_to_json(const MapReport& r);

}  // namespace chartforge

#endif  // CHARTFORGE_EVAL_CORE_H_
