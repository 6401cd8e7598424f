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

#ifndef CHARTFORGE_TARGET_RESOLVER_H_
#define CHARTFORGE_TARGET_RESOLVER_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/mask_forge.h"
#include "chartforge/scene_tracer.h"
#include "chartforge/taxonomy.h"

namespace chartforge {

struct TargetEntry {
  std::string line;  // marker id, "#k"
  std::optional<int> invocation_count;
  std::optional<std::vector<int>> element_indices;

  friend bool operator==(const TargetEntry&, const TargetEntry&) = default;
};

struct TargetSpec {
  std::vector<TargetEntry> results;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

// Validates the {"results": [...]} document. Throws kSchemaError. When
// `marker_executions` is given, null invocation counts are canonicalized
// (see canonicalize_spec).
TargetSpec parse_target_json(std::string_view text,
                             const std::map<std::string, int>* marker_executions = nullptr);
TargetSpec parse_target_json(const nlohmann::json& j,
                             const std::map<std::string, int>* marker_executions = nullptr);
inline TargetSpec parse_target_json(const char* text,
                                    const std::map<std::string, int>* marker_executions = nullptr) {
  return parse_target_json(std::string_view(text), marker_executions);
}
nlohmann::json target_spec_to_json(const TargetSpec& spec);

// Null invocation_count becomes 0 for markers that ran exactly once. Throws
// kAmbiguousNullInvocation for markers that ran more than once and
// kUnknownExecution for markers that never ran.
TargetSpec canonicalize_spec(TargetSpec spec,
                             const std::map<std::string, int>& marker_executions);

inline constexpr std::array<std::string_view, 3> kPrimaryClues = {
    "data", "visual", "textual_localization"};
inline constexpr std::array<std::string_view, 13> kClueSubtypes = {
    "value_range_filtering",
    "rank_band_set_selection",
    "local_structure_patterns",
    "cross_series_relations",
    "color_attributes",
    "shape_style",
    "line_stroke_style",
    "fill_style",
    "axis_labels",
    "axis_tick_values_positions",
    "legend_entries_positions",
    "subplot_titles_identifiers_positions",
    "text_annotations",
};

struct ClueLabels {
  std::vector<std::string> primary;
  std::vector<std::string> subtypes;
  bool hybrid = false;

  bool empty() const { return primary.empty() && subtypes.empty(); }
  friend bool operator==(const ClueLabels&, const ClueLabels&) = default;
};

// Throws kSchemaError for tags outside the vocabulary.
ClueLabels clue_labels_from_json(const nlohmann::json& j);
nlohmann::json clue_labels_to_json(const ClueLabels& c);

struct GroundingSample {
  std::string id;
  std::string image_id;
  std::string expression;
  ElementCategory category = ElementCategory::kVBar;
  ClueLabels clue_labels;
  // Annotation ids (bundle) or instance ids (scene); unordered as a set.
  std::vector<std::string> targets;

  friend bool operator==(const GroundingSample&, const GroundingSample&) = default;
};

// One resolvable instance.
struct InstanceRef {
  std::string id;
  ElementCategory category = ElementCategory::kVBar;
  std::optional<std::string> marker;
  int invocation_count = 0;
  int element_index = 0;
};

struct ResolveContext {
  std::vector<InstanceRef> instances;
  std::map<std::string, int> marker_executions;
};

ResolveContext make_context(const TracedScene& scene,
                            const std::vector<InstanceMask>& instances);

// Ids of the selected instances of `category`, in spec order without
// duplicates. Throws kUnknownExecution, kIndexOutOfRange, kSingletonViolation,
// kCategoryMismatch, kAmbiguousNullInvocation, kSchemaError (empty result).
std::vector<std::string> resolve_targets(const ResolveContext& context,
                                         const TargetSpec& spec,
                                         ElementCategory category);
std::vector<std::string> resolve_targets(const TracedScene& scene, const TargetSpec& spec,
                                         ElementCategory category);

struct TargetFormats {
  std::vector<Point> points;
  std::vector<BBox> bboxes;
  std::vector<Bitmap> masks;
};

// Aligned point/box/mask triples for `targets`. Throws kDanglingReference for
// unknown ids, kCategoryMismatch for mixed categories and kEmptyInput for an
// empty target list.
TargetFormats materialize_formats(const std::vector<InstanceMask>& instances,
                                  const std::vector<std::string>& targets);

}  // namespace chartforge

#endif  // CHARTFORGE_TARGET_RESOLVER_H_
