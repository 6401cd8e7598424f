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

#ifndef CHARTFORGE_TAXONOMY_H_
#define CHARTFORGE_TAXONOMY_H_

#include <array>
#include <optional>
#include <string_view>

namespace chartforge {

enum class ElementCategory {
  kVBar,
  kHBar,
  kHist,
  kScatter,
  kLinePoints,
  kLineWithPoints,
  kPolarLineWithPoints,
  kPolarLinePoints,
  kPolarVBar,
  kPieSector,
  kTreemap,
  kBoxPlotBoxPatch,
  kBoxMedianLine,
  kFullBox,
  kErrorBar,
  kFill,
  kFillBetweenDensity,
  kStackplotArea,
};

inline constexpr int kCategoryCount = 18;

enum class Granularity { kPrimitive, kPart, kComposite };

// Categories in ascending name order, i.e. in id order.
const std::array<ElementCategory, kCategoryCount>& all_categories();

// "VBar", "Line_withPoints", ...
std::string_view category_name(ElementCategory c);
std::optional<ElementCategory> category_from_name(std::string_view name);

// Stable id in 1..18, assigned by ascending category name.
int category_id(ElementCategory c);
std::optional<ElementCategory> category_from_id(int id);

bool is_thin_line(ElementCategory c);
Granularity category_granularity(ElementCategory c);

std::string_view granularity_name(Granularity g);
std::optional<Granularity> granularity_from_name(std::string_view name);

}  // namespace chartforge

#endif  // CHARTFORGE_TAXONOMY_H_
