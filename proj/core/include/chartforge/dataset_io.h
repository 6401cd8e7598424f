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

#ifndef CHARTFORGE_DATASET_IO_H_
#define CHARTFORGE_DATASET_IO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/mask_forge.h"
#include "chartforge/rle.h"
#include "chartforge/scene_tracer.h"
#include "chartforge/target_resolver.h"

namespace chartforge {

inline constexpr int kBundleSchemaVersion = 1;

struct ImageRecord {
  std::string id;
  std::string file;  // relative to the bundle directory
  int height = 0;
  int width = 0;
  std::string source_tag;
  std::map<std::string, int> marker_executions;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Annotation {
  std::string id;
  std::string image_id;
  std::string instance_id;
  ElementCategory category = ElementCategory::kVBar;
  Granularity granularity = Granularity::kPrimitive;
  RleMask rle;
  BBox bbox;
  Point point;
  int64_t area = 0;
  Provenance provenance;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct DatasetBundle {
  std::vector<ImageRecord> images;
  std::vector<Annotation> annotations;
  std::vector<GroundingSample> samples;

  const ImageRecord* find_image(std::string_view id) const;
  const Annotation* find_annotation(std::string_view id) const;

  friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

// "<image id>/<instance id>"
std::string annotation_id(std::string_view image_id, std::string_view instance_id);
Annotation make_annotation(std::string_view image_id, const InstanceMask& mask);
Bitmap annotation_mask(const Annotation& a);

struct SceneEntry {
  std::string image_id;
  const TracedScene* scene = nullptr;
  std::vector<InstanceMask> instances;
};

// Writes out_dir/dataset.json and out_dir/images/<image id>.png, then returns
// the bundle as read back. Throws kDanglingReference, kCategoryMismatch,
// kIOFailure.
DatasetBundle emit_dataset(const std::vector<SceneEntry>& scenes,
                           const std::vector<GroundingSample>& samples,
                           const std::filesystem::path& out_dir);

// Foreign keys, sample homogeneity and target counts.
void validate_bundle(const DatasetBundle& bundle);

nlohmann::json sample_to_json(const GroundingSample& s);
GroundingSample sample_from_json(const nlohmann::json& j);

nlohmann::json bundle_to_json(const DatasetBundle& bundle);
DatasetBundle bundle_from_json(const nlohmann::json& j);

// Rewrites dataset.json only; images are left untouched.
void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& out_dir);
// Accepts the bundle directory or its dataset.json.
DatasetBundle load_bundle(const std::filesystem::path& path);
std::filesystem::path bundle_json_path(const std::filesystem::path& path);

// Resolution context over one image's annotations.
ResolveContext bundle_context(const DatasetBundle& bundle, std::string_view image_id);

struct StatsReport {
  int64_t images = 0;
  int64_t annotations = 0;
  int64_t samples = 0;
  double mean_targets = 0.0;
  std::map<int64_t, int64_t> targets_per_sample;
  std::map<int64_t, int64_t> expression_words;
  std::map<std::string, int64_t> samples_per_category;
  std::map<std::string, int64_t> annotations_per_category;
  std::map<std::string, int64_t> clue_counts;

  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

StatsReport dataset_stats(const DatasetBundle& bundle);
nlohmann::json stats_to_json(const StatsReport& stats);

}  // namespace chartforge

#endif  // CHARTFORGE_DATASET_IO_H_
