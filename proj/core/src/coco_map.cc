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

#include <algorithm>
#include <numeric>
#include <set>

#include "chartforge/error.h"
#include "chartforge/eval_core.h"

namespace chartforge {
namespace {

constexpr int kRecallPoints = 101;

struct AreaRange {
  double lo;
  double hi;  // exclusive
};

constexpr AreaRange kAreaAll{0.0, 1e18};
constexpr AreaRange kAreaSmall{0.0, 32.0 * 32.0};
constexpr AreaRange kAreaMedium{32.0 * 32.0, 96.0 * 96.0};
constexpr AreaRange kAreaLarge{96.0 * 96.0, 1e18};

bool outside(double area, const AreaRange& r) { return area < r.lo || area >= r.hi; }

struct Detection {
  double score;
  bool tp;
  bool ignore;
};

// Instances of one category in one image.
struct ImageGroup {
  std::vector<const CocoInstance*> gts;
  std::vector<const CocoInstance*> dts;  // ranked, at most kMaxDetections
  std::vector<std::vector<double>> ious;  // [dt][gt]
};

// AP for one category, threshold and area range; -1 without ground truth.
double average_precision(const std::vector<ImageGroup>& groups, double thr,
                         const AreaRange& range) {
  std::vector<Detection> dets;
  int64_t positives = 0;
  for (const auto& g : groups) {
    std::vector<bool> gt_ignore(g.gts.size());
    for (size_t k = 0; k < g.gts.size(); ++k) {
      gt_ignore[k] = outside(static_cast<double>(g.gts[k]->mask.count()), range);
      if (!gt_ignore[k]) ++positives;
    }
    // Non-ignored ground truth is tried first.
    std::vector<size_t> order(g.gts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return gt_ignore[a] < gt_ignore[b]; });
    std::vector<bool> gt_taken(g.gts.size(), false);
    for (size_t d = 0; d < g.dts.size(); ++d) {
      double best = std::min(thr, 1.0 - 1e-10);
      int match = -1;
      for (size_t gi : order) {
        if (gt_taken[gi]) continue;
        if (match >= 0 && !gt_ignore[static_cast<size_t>(match)] && gt_ignore[gi]) break;
        if (g.ious[d][gi] < best) continue;
        best = g.ious[d][gi];
        match = static_cast<int>(gi);
      }
      Detection det{g.dts[d]->confidence, false, false};
      if (match >= 0) {
        gt_taken[static_cast<size_t>(match)] = true;
        det.tp = true;
        det.ignore = gt_ignore[static_cast<size_t>(match)];
      } else {
        det.ignore = outside(static_cast<double>(g.dts[d]->mask.count()), range);
      }
      dets.push_back(det);
    }
  }
  if (positives == 0) return -1.0;
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  std::vector<double> recall, precision;
  int64_t tp = 0, fp = 0;
  for (const auto& d : dets) {
    if (d.ignore) continue;
    (d.tp ? tp : fp) += 1;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(positives));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }
  for (size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int r = 0; r < kRecallPoints; ++r) {
    const double level = r / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<size_t>(it - recall.begin())];
  }
  return sum / kRecallPoints;
}

double mean_valid(const std::vector<double>& v) {
  double s = 0.0;
  int n = 0;
  for (double x : v) {
    if (x < 0.0) continue;
    s += x;
    ++n;
  }
  return n > 0 ? s / n : -1.0;
}

}  // namespace

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

MapReport coco_map(const std::vector<CocoInstance>& preds,
                   const std::vector<CocoInstance>& gts,
                   const std::vector<double>& iou_thresholds) {
  if (iou_thresholds.empty()) fail(ErrorCode::kEmptyInput, "no IoU thresholds");
  for (const auto& p : preds) {
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "confidence outside [0, 1]");
    }
  }
  std::set<ElementCategory> categories;
  std::set<std::string> images;
  for (const auto& g : gts) {
    categories.insert(g.category);
    images.insert(g.image_id);
  }
  for (const auto& p : preds) images.insert(p.image_id);

  MapReport report;
  std::vector<double> all_ap, ap50, ap75, small, medium, large;
  for (auto c : categories) {
    std::vector<ImageGroup> groups;
    for (const auto& image : images) {
      ImageGroup g;
      for (const auto& x : gts) {
        if (x.category == c && x.image_id == image) g.gts.push_back(&x);
      }
      for (const auto& x : preds) {
        if (x.category == c && x.image_id == image) g.dts.push_back(&x);
      }
      if (g.gts.empty() && g.dts.empty()) continue;
      std::stable_sort(g.dts.begin(), g.dts.end(), [](const auto* a, const auto* b) {
        return a->confidence > b->confidence;
      });
      if (g.dts.size() > static_cast<size_t>(kMaxDetections)) g.dts.resize(kMaxDetections);
      g.ious.assign(g.dts.size(), std::vector<double>(g.gts.size(), 0.0));
      for (size_t d = 0; d < g.dts.size(); ++d) {
        for (size_t k = 0; k < g.gts.size(); ++k) {
          g.ious[d][k] = mask_iou(g.dts[d]->mask, g.gts[k]->mask);
        }
      }
      groups.push_back(std::move(g));
    }
    std::vector<double> per_threshold;
    for (double t : iou_thresholds) {
      const double ap = average_precision(groups, t, kAreaAll);
      per_threshold.push_back(ap);
      all_ap.push_back(ap);
      if (std::abs(t - 0.5) < 1e-12) ap50.push_back(ap);
      if (std::abs(t - 0.75) < 1e-12) ap75.push_back(ap);
      small.push_back(average_precision(groups, t, kAreaSmall));
      medium.push_back(average_precision(groups, t, kAreaMedium));
      large.push_back(average_precision(groups, t, kAreaLarge));
    }
    report.per_category[std::string(category_name(c))] = mean_valid(per_threshold);
  }
  report.map = mean_valid(all_ap);
  report.ap50 = mean_valid(ap50);
  report.ap75 = mean_valid(ap75);
  report.ap_small = mean_valid(small);
  report.ap_medium = mean_valid(medium);
  report.ap_large = mean_valid(large);
  return report;
}

nlohmann::json map_report_to_json(const MapReport& r) {
  return {{"map", r.map},
          {"ap50", r.ap50},
          {"ap75", r.ap75},
          {"ap_small", r.ap_small},
          {"ap_medium", r.ap_medium},
          {"ap_large", r.ap_large},
          {"per_category", r.per_category}};
}

}  // namespace chartforge
