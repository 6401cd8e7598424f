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

#ifndef CHARTFORGE_PREDICTIONS_H_
#define CHARTFORGE_PREDICTIONS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/dataset_io.h"
#include "chartforge/eval_core.h"
#include "chartforge/rle.h"

namespace chartforge {

enum class PredictionFormat { kPoint, kBbox, kMask };

std::string_view format_name(PredictionFormat f);
// "point", "bbox", "mask" ("seg" is accepted for masks).
std::optional<PredictionFormat> format_from_name(std::string_view name);

// One JSON line: {"sample_id", "format", "items": [...]}. Points are [x, y],
// boxes [x_min, y_min, x_max, y_max], masks RLE objects.
struct PredictionSet {
  std::string sample_id;
  PredictionFormat format = PredictionFormat::kMask;
  std::vector<Point> points;
  std::vector<BBox> boxes;
  std::vector<RleMask> masks;

  size_t size() const;
  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

nlohmann::json prediction_to_json(const PredictionSet& p);
PredictionSet prediction_from_json(const nlohmann::json& j);

// One JSON line: {"image_id", "category", "score", "segmentation"}.
struct InstancePrediction {
  std::string image_id;
  ElementCategory category = ElementCategory::kVBar;
  double score = 1.0;
  RleMask segmentation;

  friend bool operator==(const InstancePrediction&, const InstancePrediction&) = default;
};

nlohmann::json instance_prediction_to_json(const InstancePrediction& p);
// Throws kUnknownCategory for names outside the taxonomy.
InstancePrediction instance_prediction_from_json(const nlohmann::json& j);

std::vector<PredictionSet> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path,
                       const std::vector<PredictionSet>& preds);
std::vector<InstancePrediction> read_instance_predictions(const std::filesystem::path& path);
void write_instance_predictions(const std::filesystem::path& path,
                                const std::vector<InstancePrediction>& preds);

// Scores every bundle sample; samples without a prediction count as empty
// predictions. Mask format also fills miou_union.
MetricReport evaluate_bundle(const DatasetBundle& bundle,
                             const std::vector<PredictionSet>& preds,
                             PredictionFormat format);

// COCO-style mAP against every bundle annotation.
MapReport evaluate_map(const DatasetBundle& bundle,
                       const std::vector<InstancePrediction>& preds);

// Ground truth written as predictions, for self-evaluation.
std::vector<PredictionSet> gold_predictions(const DatasetBundle& bundle,
                                            PredictionFormat format);
std::vector<InstancePrediction> gold_instances(const DatasetBundle& bundle);

}  // namespace chartforge

#endif  // CHARTFORGE_PREDICTIONS_H_
