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

#include "chartforge/predictions.h"

#include <fstream>
#include <map>

#include "chartforge/error.h"

namespace chartforge {
namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::kSchemaError, msg); }

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIOFailure, "cannot open " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      schema(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(ErrorCode::kIOFailure, "cannot write " + path.string());
  for (const auto& r : rows) f << r.dump() << "\n";
  if (!f) fail(ErrorCode::kIOFailure, "cannot write " + path.string());
}

Bitmap decode_for(const RleMask& rle, const ImageRecord& image) {
  if (rle.height != image.height || rle.width != image.width) {
    fail(ErrorCode::kDimensionMismatch, "predicted mask size differs from image " + image.id);
  }
  return decode_rle(rle);
}

}  // namespace

std::string_view format_name(PredictionFormat f) {
  switch (f) {
    case PredictionFormat::kPoint:
      return "point";
    case PredictionFormat::kBbox:
      return "bbox";
    case PredictionFormat::kMask:
      return "mask";
  }
  return "mask";
}

std::optional<PredictionFormat> format_from_name(std::string_view name) {
  if (name == "point") return PredictionFormat::kPoint;
  if (name == "bbox") return PredictionFormat::kBbox;
  if (name == "mask" || name == "seg") return PredictionFormat::kMask;
  return std::nullopt;
}

size_t PredictionSet::size() const {
  switch (format) {
    case PredictionFormat::kPoint:
      return points.size();
    case PredictionFormat::kBbox:
      return boxes.size();
    case PredictionFormat::kMask:
      return masks.size();
  }
  return 0;
}

nlohmann::json prediction_to_json(const PredictionSet& p) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& pt : p.points) items.push_back({pt.x, pt.y});
  for (const auto& b : p.boxes) items.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
  for (const auto& m : p.masks) items.push_back(rle_to_json(m));
  return {{"sample_id", p.sample_id}, {"format", format_name(p.format)}, {"items", items}};
}

PredictionSet prediction_from_json(const nlohmann::json& j) {
  try {
    PredictionSet p;
    p.sample_id = j.at("sample_id").get<std::string>();
    const auto fmt = format_from_name(j.at("format").get<std::string>());
    if (!fmt) schema("unknown prediction format in sample " + p.sample_id);
    p.format = *fmt;
    for (const auto& item : j.at("items")) {
      switch (p.format) {
        case PredictionFormat::kPoint: {
          const auto v = item.get<std::array<double, 2>>();
          p.points.push_back({v[0], v[1]});
          break;
        }
        case PredictionFormat::kBbox: {
          const auto v = item.get<std::array<double, 4>>();
          p.boxes.push_back({v[0], v[1], v[2], v[3]});
          break;
        }
        case PredictionFormat::kMask:
          p.masks.push_back(rle_from_json(item));
          break;
      }
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    schema(std::string("bad prediction record: ") + e.what());
  }
}

nlohmann::json instance_prediction_to_json(const InstancePrediction& p) {
  return {{"image_id", p.image_id},
          {"category", category_name(p.category)},
          {"score", p.score},
          {"segmentation", rle_to_json(p.segmentation)}};
}

InstancePrediction instance_prediction_from_json(const nlohmann::json& j) {
  try {
    InstancePrediction p;
    p.image_id = j.at("image_id").get<std::string>();
    const auto name = j.at("category").get<std::string>();
    const auto c = category_from_name(name);
    if (!c) fail(ErrorCode::kUnknownCategory, "unknown category '" + name + "'");
    p.category = *c;
    p.score = j.value("score", 1.0);
    p.segmentation = rle_from_json(j.at("segmentation"));
    return p;
  } catch (const nlohmann::json::exception& e) {
    schema(std::string("bad instance prediction: ") + e.what());
  }
}

std::vector<PredictionSet> read_predictions(const std::filesystem::path& path) {
  std::vector<PredictionSet> out;
  for (const auto& j : read_jsonl(path)) out.push_back(prediction_from_json(j));
  return out;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<PredictionSet>& preds) {
  std::vector<nlohmann::json> rows;
  for (const auto& p : preds) rows.push_back(prediction_to_json(p));
  write_jsonl(path, rows);
}

std::vector<InstancePrediction> read_instance_predictions(const std::filesystem::path& path) {
  std::vector<InstancePrediction> out;
  for (const auto& j : read_jsonl(path)) out.push_back(instance_prediction_from_json(j));
  return out;
}

void write_instance_predictions(const std::filesystem::path& path,
                                const std::vector<InstancePrediction>& preds) {
  std::vector<nlohmann::json> rows;
  for (const auto& p : preds) rows.push_back(instance_prediction_to_json(p));
  write_jsonl(path, rows);
}

MetricReport evaluate_bundle(const DatasetBundle& bundle,
                             const std::vector<PredictionSet>& preds,
                             PredictionFormat format) {
  std::map<std::string, const PredictionSet*> by_sample;
  for (const auto& p : preds) {
    if (p.format != format) {
      schema("prediction for " + p.sample_id + " is " + std::string(format_name(p.format)) +
             ", expected " + std::string(format_name(format)));
    }
    if (!by_sample.emplace(p.sample_id, &p).second) {
      schema("duplicate prediction for sample " + p.sample_id);
    }
  }
  for (const auto& [id, p] : by_sample) {
    bool known = false;
    for (const auto& s : bundle.samples) known = known || s.id == id;
    if (!known) fail(ErrorCode::kDanglingReference, "prediction for unknown sample " + id);
  }

  std::vector<SampleMetrics> per_sample;
  std::vector<double> mious;
  std::vector<std::string> ids;
  for (const auto& s : bundle.samples) {
    const auto* image = bundle.find_image(s.image_id);
    std::vector<Bitmap> gt_masks;
    std::vector<BBox> gt_boxes;
    for (const auto& t : s.targets) {
      const auto* a = bundle.find_annotation(t);
      gt_masks.push_back(annotation_mask(*a));
      gt_boxes.push_back(a->bbox);
    }
    auto it = by_sample.find(s.id);
    const PredictionSet empty{s.id, format, {}, {}, {}};
    const PredictionSet& p = it == by_sample.end() ? empty : *it->second;
    ids.push_back(s.id);
    switch (format) {
      case PredictionFormat::kPoint:
        per_sample.push_back(eval_points(p.points, gt_masks));
        break;
      case PredictionFormat::kBbox:
        per_sample.push_back(eval_boxes(p.boxes, gt_boxes));
        break;
      case PredictionFormat::kMask: {
        std::vector<Bitmap> pred_masks;
        for (const auto& m : p.masks) pred_masks.push_back(decode_for(m, *image));
        per_sample.push_back(eval_masks(pred_masks, gt_masks, s.category));
        mious.push_back(miou_union(pred_masks, gt_masks));
        break;
      }
    }
  }
  MetricReport report = macro_aggregate(per_sample, mious);
  report.sample_ids = std::move(ids);
  return report;
}

MapReport evaluate_map(const DatasetBundle& bundle,
                       const std::vector<InstancePrediction>& preds) {
  std::vector<CocoInstance> gts;
  for (const auto& a : bundle.annotations) {
    gts.push_back({a.image_id, a.category, annotation_mask(a), 1.0});
  }
  std::vector<CocoInstance> dts;
  for (const auto& p : preds) {
    const auto* image = bundle.find_image(p.image_id);
    if (image == nullptr) {
      fail(ErrorCode::kDanglingReference, "prediction for unknown image " + p.image_id);
    }
    dts.push_back({p.image_id, p.category, decode_for(p.segmentation, *image), p.score});
  }
  return coco_map(dts, gts);
}

std::vector<PredictionSet> gold_predictions(const DatasetBundle& bundle,
                                            PredictionFormat format) {
  std::vector<PredictionSet> out;
  for (const auto& s : bundle.samples) {
    PredictionSet p;
    p.sample_id = s.id;
    p.format = format;
    for (const auto& t : s.targets) {
      const auto* a = bundle.find_annotation(t);
      switch (format) {
        case PredictionFormat::kPoint:
          p.points.push_back(a->point);
          break;
        case PredictionFormat::kBbox:
          p.boxes.push_back(a->bbox);
          break;
        case PredictionFormat::kMask:
          p.masks.push_back(a->rle);
          break;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<InstancePrediction> gold_instances(const DatasetBundle& bundle) {
  std::vector<InstancePrediction> out;
  for (const auto& a : bundle.annotations) out.push_back({a.image_id, a.category, 1.0, a.rle});
  return out;
}

}  // namespace chartforge
