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

#include "chartforge/taxonomy.h"

#include <algorithm>
#include <string>
#include <utility>

namespace chartforge {
namespace {

struct CategoryInfo {
  ElementCategory category;
  std::string_view name;
  Granularity granularity;
  bool thin_line;
};

constexpr std::array<CategoryInfo, kCategoryCount> kCategories{{
    {ElementCategory::kVBar, "VBar", Granularity::kPrimitive, false},
    {ElementCategory::kHBar, "HBar", Granularity::kPrimitive, false},
    {ElementCategory::kHist, "Hist", Granularity::kPrimitive, false},
    {ElementCategory::kScatter, "Scatter", Granularity::kPrimitive, false},
    {ElementCategory::kLinePoints, "LinePoints", Granularity::kPrimitive, false},
    {ElementCategory::kLineWithPoints, "Line_withPoints", Granularity::kComposite, true},
    {ElementCategory::kPolarLineWithPoints, "PolarLine_withPoints",
     Granularity::kComposite, true},
    {ElementCategory::kPolarLinePoints, "PolarLinePoints", Granularity::kPrimitive, false},
    {ElementCategory::kPolarVBar, "PolarVBar", Granularity::kPrimitive, false},
    {ElementCategory::kPieSector, "PieSector", Granularity::kPrimitive, false},
    {ElementCategory::kTreemap, "Treemap", Granularity::kPrimitive, false},
    {ElementCategory::kBoxPlotBoxPatch, "BoxPlot_BoxPatch", Granularity::kPart, false},
    {ElementCategory::kBoxMedianLine, "BoxMedianLine", Granularity::kPart, true},
    {ElementCategory::kFullBox, "FullBox", Granularity::kComposite, false},
    {ElementCategory::kErrorBar, "ErrorBar", Granularity::kComposite, true},
    {ElementCategory::kFill, "Fill", Granularity::kPrimitive, false},
    {ElementCategory::kFillBetweenDensity, "Fill_between_density",
     Granularity::kPrimitive, false},
    {ElementCategory::kStackplotArea, "Stackplot_area", Granularity::kPrimitive, false},
}};

const CategoryInfo& info(ElementCategory c) {
  return kCategories[static_cast<size_t>(c)];
}

std::array<ElementCategory, kCategoryCount> sorted_by_name() {
  std::array<ElementCategory, kCategoryCount> out{};
  for (size_t i = 0; i < kCategories.size(); ++i) out[i] = kCategories[i].category;
  std::sort(out.begin(), out.end(), [](ElementCategory a, ElementCategory b) {
    return info(a).name < info(b).name;
  });
  return out;
}

}  // namespace

const std::array<ElementCategory, kCategoryCount>& all_categories() {
  static const auto sorted = sorted_by_name();
  return sorted;
}

std::string_view category_name(ElementCategory c) { return info(c).name; }

std::optional<ElementCategory> category_from_name(std::string_view name) {
  for (const auto& ci : kCategories) {
    if (ci.name == name) return ci.category;
  }
  return std::nullopt;
}

int category_id(ElementCategory c) {
  const auto& sorted = all_categories();
  return static_cast<int>(std::find(sorted.begin(), sorted.end(), c) - sorted.begin()) + 1;
}

std::optional<ElementCategory> category_from_id(int id) {
  if (id < 1 || id > kCategoryCount) return std::nullopt;
  return all_categories()[static_cast<size_t>(id - 1)];
}

bool is_thin_line(ElementCategory c) { return info(c).thin_line; }

Granularity category_granularity(ElementCategory c) { return info(c).granularity; }

std::string_view granularity_name(Granularity g) {
  switch (g) {
    case Granularity::kPrimitive:
      return "primitive";
    case Granularity::kPart:
      return "part";
    case Granularity::kComposite:
      return "composite";
  }
  return "primitive";
}

std::optional<Granularity> granularity_from_name(std::string_view name) {
  for (auto g : {Granularity::kPrimitive, Granularity::kPart, Granularity::kComposite}) {
    if (granularity_name(g) == name) return g;
  }
  return std::nullopt;
}

}  // namespace chartforge
