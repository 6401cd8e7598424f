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

#ifndef CHARTFORGE_MASK_FORGE_H_
#define CHARTFORGE_MASK_FORGE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chartforge/bitmap.h"
#include "chartforge/scene_tracer.h"
#include "chartforge/taxonomy.h"

namespace chartforge {

enum class StyleOverride { kLineOnly, kMarkersOnly };

struct Provenance {
  std::optional<std::string> marker;
  int invocation_count = 0;
  std::optional<int> element_index;
  int call_index = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct InstanceMask {
  // "<call index>:<category>:<element index>", unique within a scene.
  std::string instance_id;
  Bitmap bitmap;
  ElementCategory category = ElementCategory::kVBar;
  Granularity granularity = Granularity::kPrimitive;
  Provenance provenance;

  friend bool operator==(const InstanceMask&, const InstanceMask&) = default;
};

// Continuous pixel coordinates, origin top-left, max edges exclusive.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const;
  bool valid() const { return x_min < x_max && y_min < y_max; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Binarized isolation render of one primitive. Throws kEmptyMask when nothing
// is visible and kUnsupportedGranularity when the override is unavailable.
Bitmap extract_primitive_mask(const TracedScene& scene, std::string_view primitive_id,
                              std::optional<StyleOverride> style = std::nullopt);

// Category of a (call, role, granularity) combination. Throws
// kUnmappedCombination outside the taxonomy.
ElementCategory assign_label(const TracedCall& call, PrimitiveRole role,
                             Granularity granularity);

// Every category the call can produce, in taxonomy order.
std::vector<ElementCategory> call_categories(const TracedScene& scene,
                                             const TracedCall& call);

// Instances of one category drawn by `call`, ordered by element index.
// Instances with no visible pixels are dropped and reported in `skipped`.
// Throws kUnsupportedGranularity when the call cannot produce `category`.
std::vector<InstanceMask> compose_instances(const TracedScene& scene,
                                            const TracedCall& call,
                                            ElementCategory category,
                                            std::vector<std::string>* skipped = nullptr);

// All instances at `granularity` across the call's categories.
std::vector<InstanceMask> compose_instances(const TracedScene& scene,
                                            const TracedCall& call,
                                            Granularity granularity,
                                            std::vector<std::string>* skipped = nullptr);

// Every instance of every category for every traced call.
struct SceneInstances {
  std::vector<InstanceMask> instances;
  std::vector<std::string> warnings;
};
SceneInstances synthesize_scene(const TracedScene& scene);

// Tight box; the max edges sit one pixel past the last foreground pixel.
BBox tight_bbox(const Bitmap& mask);

// Center of the foreground pixel nearest to the foreground centroid, ties by
// (y, x) ascending.
Point representative_point(const Bitmap& mask);

}  // namespace chartforge

#endif  // CHARTFORGE_MASK_FORGE_H_
