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

#include "chartforge/eval_core.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chartforge/error.h"

namespace chartforge {
namespace {

void check_same_shape(const std::vector<Bitmap>& a, const std::vector<Bitmap>& b) {
  const Bitmap* ref = !a.empty() ? &a.front() : (!b.empty() ? &b.front() : nullptr);
  if (ref == nullptr) return;
  for (const auto* list : {&a, &b}) {
    for (const auto& m : *list) {
      if (!m.same_shape(*ref)) {
        fail(ErrorCode::kDimensionMismatch, "masks differ in size");
      }
    }
  }
}

struct PixelList {
  std::vector<std::pair<int, int>> pixels;
};

PixelList foreground(const Bitmap& m) {
  PixelList out;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.at(x, y)) out.pixels.emplace_back(x, y);
    }
  }
  return out;
}

double distance_to(const Point& p, const Bitmap& mask, const PixelList& fg) {
  const double fx = std::floor(p.x);
  const double fy = std::floor(p.y);
  if (fx >= 0 && fy >= 0 && fx < mask.width() && fy < mask.height() &&
      mask.at(static_cast<int>(fx), static_cast<int>(fy))) {
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : fg.pixels) {
    const double dx = p.x - (x + 0.5);
    const double dy = p.y - (y + 0.5);
    best = std::min(best, dx * dx + dy * dy);
  }
  return std::sqrt(best);
}

SampleMetrics from_matching(const Matching& m, size_t preds, size_t gts) {
  return make_metrics(static_cast<int64_t>(m.pairs.size()), static_cast<int64_t>(preds),
                      static_cast<int64_t>(gts));
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

SampleMetrics make_metrics(int64_t tp, int64_t num_preds, int64_t num_gts) {
  if (tp < 0 || tp > num_preds || tp > num_gts) {
    fail(ErrorCode::kInvalidArgument, "tp must lie in [0, min(preds, gts)]");
  }
  SampleMetrics m;
  m.tp = tp;
  m.fp = num_preds - tp;
  m.fn = num_gts - tp;
  m.precision = num_preds > 0 ? static_cast<double>(tp) / static_cast<double>(num_preds) : 0.0;
  m.recall = num_gts > 0 ? static_cast<double>(tp) / static_cast<double>(num_gts) : 0.0;
  const double s = m.precision + m.recall;
  m.f1 = s > 0.0 ? 2.0 * m.precision * m.recall / s : 0.0;
  return m;
}

double point_mask_distance(const Point& p, const Bitmap& mask) {
  return distance_to(p, mask, foreground(mask));
}

SampleMetrics eval_points(const std::vector<Point>& preds, const std::vector<Bitmap>& gts,
                          double radius_px) {
  check_same_shape(gts, {});
  std::vector<PixelList> fg;
  fg.reserve(gts.size());
  for (const auto& g : gts) fg.push_back(foreground(g));
  ScoreMatrix scores(preds.size(), std::vector<double>(gts.size(), 0.0));
  EligibilityMatrix eligible(preds.size(), std::vector<bool>(gts.size(), false));
  for (size_t i = 0; i < preds.size(); ++i) {
    for (size_t j = 0; j < gts.size(); ++j) {
      const double d = distance_to(preds[i], gts[j], fg[j]);
      scores[i][j] = -d;
      eligible[i][j] = d <= radius_px;
    }
  }
  return from_matching(hungarian_match(scores, eligible), preds.size(), gts.size());
}

double box_iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = iw > 0.0 && ih > 0.0 ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

SampleMetrics eval_boxes(const std::vector<BBox>& preds, const std::vector<BBox>& gts,
                         double iou_thr) {
  ScoreMatrix scores(preds.size(), std::vector<double>(gts.size(), 0.0));
  EligibilityMatrix eligible(preds.size(), std::vector<bool>(gts.size(), false));
  for (size_t i = 0; i < preds.size(); ++i) {
    for (size_t j = 0; j < gts.size(); ++j) {
      scores[i][j] = box_iou(preds[i], gts[j]);
      eligible[i][j] = scores[i][j] >= iou_thr;
    }
  }
  return from_matching(hungarian_match(scores, eligible), preds.size(), gts.size());
}

double mask_iou(const Bitmap& a, const Bitmap& b) {
  const int64_t uni = union_count(a, b);
  return uni > 0 ? static_cast<double>(intersection_count(a, b)) / static_cast<double>(uni)
                 : 0.0;
}

Bitmap boundary_band(const Bitmap& mask, int d) {
  if (d < 1) fail(ErrorCode::kInvalidArgument, "band width must be >= 1");
  return difference(mask, erode_square(mask, d));
}

double boundary_iou(const Bitmap& a, const Bitmap& b, const std::vector<int>& d_set) {
  if (!a.same_shape(b)) fail(ErrorCode::kDimensionMismatch, "masks differ in size");
  if (d_set.empty()) fail(ErrorCode::kEmptyInput, "empty distance set");
  std::vector<double> values;
  for (int d : d_set) {
    const Bitmap ba = boundary_band(a, d);
    const Bitmap bb = boundary_band(b, d);
    values.push_back(mask_iou(ba, bb));
  }
  return mean(values);
}

SimilarityKind mask_similarity_kind(ElementCategory category) {
  return is_thin_line(category) ? SimilarityKind::kBoundaryIou : SimilarityKind::kMaskIou;
}

MaskEvaluation eval_masks_detailed(const std::vector<Bitmap>& preds,
                                   const std::vector<Bitmap>& gts, ElementCategory category,
                                   double thr) {
  check_same_shape(preds, gts);
  MaskEvaluation out;
  out.similarity = mask_similarity_kind(category);
  ScoreMatrix scores(preds.size(), std::vector<double>(gts.size(), 0.0));
  EligibilityMatrix eligible(preds.size(), std::vector<bool>(gts.size(), false));
  for (size_t i = 0; i < preds.size(); ++i) {
    for (size_t j = 0; j < gts.size(); ++j) {
      scores[i][j] = out.similarity == SimilarityKind::kBoundaryIou
                         ? boundary_iou(preds[i], gts[j])
                         : mask_iou(preds[i], gts[j]);
      eligible[i][j] = scores[i][j] >= thr;
    }
  }
  out.matching = hungarian_match(scores, eligible);
  out.metrics = from_matching(out.matching, preds.size(), gts.size());
  return out;
}

SampleMetrics eval_masks(const std::vector<Bitmap>& preds, const std::vector<Bitmap>& gts,
                         ElementCategory category, double thr) {
  return eval_masks_detailed(preds, gts, category, thr).metrics;
}

double miou_union(const std::vector<Bitmap>& preds, const std::vector<Bitmap>& gts) {
  if (gts.empty()) fail(ErrorCode::kEmptyInput, "miou_union needs ground truth");
  check_same_shape(preds, gts);
  Bitmap gu(gts.front().height(), gts.front().width());
  for (const auto& g : gts) gu |= g;
  Bitmap pu(gu.height(), gu.width());
  for (const auto& p : preds) pu |= p;
  return mask_iou(pu, gu);
}

MetricReport macro_aggregate(const std::vector<SampleMetrics>& per_sample,
                             const std::vector<double>& miou_values) {
  if (per_sample.empty()) fail(ErrorCode::kEmptyInput, "no samples to aggregate");
  if (!miou_values.empty() && miou_values.size() != per_sample.size()) {
    fail(ErrorCode::kLengthMismatch, "miou values not aligned with samples");
  }
  MetricReport r;
  r.per_sample = per_sample;
  r.per_sample_miou = miou_values;
  for (const auto& m : per_sample) {
    r.macro_p += m.precision;
    r.macro_r += m.recall;
    r.macro_f1 += m.f1;
  }
  const auto n = static_cast<double>(per_sample.size());
  r.macro_p /= n;
  r.macro_r /= n;
  r.macro_f1 /= n;
  if (!miou_values.empty()) r.miou_union = mean(miou_values);
  return r;
}

nlohmann::json metrics_to_json(const SampleMetrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1}};
}

nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["macro_p"] = r.macro_p;
  j["macro_r"] = r.macro_r;
  j["macro_f1"] = r.macro_f1;
  j["miou_union"] = r.miou_union ? nlohmann::json(*r.miou_union) : nlohmann::json(nullptr);
  j["per_sample"] = nlohmann::json::array();
  for (size_t i = 0; i < r.per_sample.size(); ++i) {
    auto s = metrics_to_json(r.per_sample[i]);
    if (i < r.sample_ids.size()) s["sample_id"] = r.sample_ids[i];
    if (i < r.per_sample_miou.size()) s["miou_union"] = r.per_sample_miou[i];
    j["per_sample"].push_back(std::move(s));
  }
  return j;
}

}  // namespace chartforge
