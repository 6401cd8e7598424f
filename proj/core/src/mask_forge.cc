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

#include "chartforge/mask_forge.h"

#include <algorithm>
#include <limits>

#include "chartforge/error.h"

namespace chartforge {
namespace {

using RecordList = std::vector<const PrimitiveRecord*>;

RecordList role_primitives(const TracedScene& scene, const TracedCall& call,
                           PrimitiveRole role) {
  RecordList out;
  for (const auto& id : call.primitive_ids) {
    const auto& rec = scene.primitive(id);
    if (rec.role == role) out.push_back(&rec);
  }
  // Records without an index keep their return order.
  std::stable_sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
    return a->per_datum_index.value_or(std::numeric_limits<int>::max()) <
           b->per_datum_index.value_or(std::numeric_limits<int>::max());
  });
  return out;
}

const PrimitiveRecord* find_index(const RecordList& list, int index) {
  for (const auto* rec : list) {
    if (rec->per_datum_index == index) return rec;
  }
  return nullptr;
}

const Bitmap& full_render(const TracedScene& scene, const PrimitiveRecord& rec) {
  auto it = scene.renders.find(rec.id);
  if (it == scene.renders.end()) {
    fail(ErrorCode::kRenderMismatch, "no isolation render for " + rec.id);
  }
  const Bitmap& b = it->second.full;
  if (b.height() != scene.height() || b.width() != scene.width()) {
    fail(ErrorCode::kRenderMismatch, "isolation render of " + rec.id + " has wrong size");
  }
  return b;
}

std::vector<PrimitiveRole> call_roles(const TracedScene& scene, const TracedCall& call) {
  std::vector<PrimitiveRole> roles;
  for (const auto& id : call.primitive_ids) {
    const auto role = scene.primitive(id).role;
    if (std::find(roles.begin(), roles.end(), role) == roles.end()) roles.push_back(role);
  }
  return roles;
}

std::optional<ElementCategory> try_label(const TracedCall& call, PrimitiveRole role,
                                         Granularity g) {
  try {
    return assign_label(call, role, g);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnmappedCombination) throw;
    return std::nullopt;
  }
}

InstanceMask make_instance(const TracedCall& call, ElementCategory category, int element,
                           Bitmap bitmap) {
  InstanceMask m;
  m.instance_id = std::to_string(call.index) + ":" + std::string(category_name(category)) +
                  ":" + std::to_string(element);
  m.bitmap = std::move(bitmap);
  m.category = category;
  m.granularity = category_granularity(category);
  m.provenance = {call.marker, call.invocation_count, element, call.index};
  return m;
}

}  // namespace

double BBox::area() const {
  return valid() ? (x_max - x_min) * (y_max - y_min) : 0.0;
}

Bitmap extract_primitive_mask(const TracedScene& scene, std::string_view primitive_id,
                              std::optional<StyleOverride> style) {
  const auto& rec = scene.primitive(primitive_id);
  const Bitmap* mask = &full_render(scene, rec);
  if (style) {
    const auto& render = scene.renders.at(rec.id);
    const auto& chosen =
        *style == StyleOverride::kLineOnly ? render.line_only : render.markers_only;
    if (chosen) {
      mask = &*chosen;
    } else if (rec.role == PrimitiveRole::kLinePath && !render.line_only &&
               !render.markers_only && *style == StyleOverride::kLineOnly) {
      // A line drawn without markers is its own line-only render.
    } else {
      fail(ErrorCode::kUnsupportedGranularity,
           std::string(*style == StyleOverride::kLineOnly ? "line_only" : "markers_only") +
               " is not available for " + rec.id);
    }
  }
  if (!mask->any()) {
    fail(ErrorCode::kEmptyMask, rec.id + " has no visible pixels");
  }
  return *mask;
}

ElementCategory assign_label(const TracedCall& call, PrimitiveRole role,
                             Granularity g) {
  const bool polar = call.axes_kind == AxesKind::kPolar;
  const std::string& api = call.api_name;
  using R = PrimitiveRole;
  using G = Granularity;
  using C = ElementCategory;
  if (api == "plot" || api == "errorbar") {
    if (role == R::kMarkerSet && g == G::kPrimitive) {
      if (!call.args.linestyle) return C::kScatter;
      return polar ? C::kPolarLinePoints : C::kLinePoints;
    }
    if (role == R::kLinePath && g == G::kComposite) {
      return polar ? C::kPolarLineWithPoints : C::kLineWithPoints;
    }
    if (api == "errorbar" && role == R::kErrorbarLine && g == G::kComposite && !polar) {
      return C::kErrorBar;
    }
  } else if (api == "scatter") {
    if (role == R::kMarkerSet && g == G::kPrimitive) return C::kScatter;
  } else if (api == "bar" || api == "barh") {
    if (role == R::kBarPatch && g == G::kPrimitive) {
      const bool horizontal = api == "barh" || call.args.orientation == "horizontal";
      if (polar && !horizontal) return C::kPolarVBar;
      if (!polar) return horizontal ? C::kHBar : C::kVBar;
    }
  } else if (api == "hist") {
    if (role == R::kBinPatch && g == G::kPrimitive && !polar) return C::kHist;
  } else if (api == "pie") {
    if (role == R::kWedge && g == G::kPrimitive) return C::kPieSector;
  } else if (api == "fill" || api == "fill_between" || api == "stackplot") {
    if (role == R::kAreaPatch && g == G::kPrimitive && !polar) {
      if (api == "fill") return C::kFill;
      return api == "stackplot" ? C::kStackplotArea : C::kFillBetweenDensity;
    }
  } else if (api == "add_patch") {
    if (role == R::kRectangle && g == G::kPrimitive && !polar) return C::kTreemap;
  } else if (api == "boxplot" && !polar) {
    if (role == R::kBoxBody && g == G::kPart) return C::kBoxPlotBoxPatch;
    if (role == R::kMedian && g == G::kPart) return C::kBoxMedianLine;
    if (role == R::kBoxBody && g == G::kComposite) return C::kFullBox;
  }
  fail(ErrorCode::kUnmappedCombination,
       "(" + api + ", " + std::string(role_name(role)) + ", " +
           std::string(axes_kind_name(call.axes_kind)) + ", " +
           std::string(granularity_name(g)) + ")");
}

std::vector<ElementCategory> call_categories(const TracedScene& scene,
                                             const TracedCall& call) {
  std::vector<ElementCategory> out;
  for (auto role : call_roles(scene, call)) {
    for (auto g : {Granularity::kPrimitive, Granularity::kPart, Granularity::kComposite}) {
      if (auto c = try_label(call, role, g)) {
        if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<InstanceMask> compose_instances(const TracedScene& scene,
                                            const TracedCall& call,
                                            ElementCategory category,
                                            std::vector<std::string>* skipped) {
  const auto available = call_categories(scene, call);
  if (std::find(available.begin(), available.end(), category) == available.end()) {
    fail(ErrorCode::kUnsupportedGranularity,
         std::string(category_name(category)) + " is not produced by call " +
             std::to_string(call.index) + " (" + call.api_name + ")");
  }
  std::vector<InstanceMask> out;
  auto emit = [&](int element, Bitmap bitmap) {
    if (!bitmap.any()) {
      if (skipped != nullptr) {
        skipped->push_back(std::to_string(call.index) + ":" +
                           std::string(category_name(category)) + ":" +
                           std::to_string(element) + " has no visible pixels");
      }
      return;
    }
    out.push_back(make_instance(call, category, element, std::move(bitmap)));
  };
  auto union_into = [&](Bitmap& acc, const PrimitiveRecord* rec) {
    if (rec != nullptr) acc |= full_render(scene, *rec);
  };

  if (category == ElementCategory::kFullBox) {
    const auto bodies = role_primitives(scene, call, PrimitiveRole::kBoxBody);
    const auto medians = role_primitives(scene, call, PrimitiveRole::kMedian);
    const auto whiskers = role_primitives(scene, call, PrimitiveRole::kWhisker);
    const auto caps = role_primitives(scene, call, PrimitiveRole::kCap);
    for (size_t k = 0; k < bodies.size(); ++k) {
      const int i = bodies[k]->per_datum_index.value_or(static_cast<int>(k));
      Bitmap acc = full_render(scene, *bodies[k]);
      union_into(acc, find_index(medians, i));
      union_into(acc, find_index(whiskers, 2 * i));
      union_into(acc, find_index(whiskers, 2 * i + 1));
      union_into(acc, find_index(caps, 2 * i));
      union_into(acc, find_index(caps, 2 * i + 1));
      emit(i, std::move(acc));
    }
    return out;
  }
  if (category == ElementCategory::kErrorBar) {
    const auto lines = role_primitives(scene, call, PrimitiveRole::kErrorbarLine);
    const auto caps = role_primitives(scene, call, PrimitiveRole::kErrorbarCap);
    for (size_t k = 0; k < lines.size(); ++k) {
      const int i = lines[k]->per_datum_index.value_or(static_cast<int>(k));
      Bitmap acc = full_render(scene, *lines[k]);
      union_into(acc, find_index(caps, i));
      emit(i, std::move(acc));
    }
    return out;
  }

  const Granularity g = category_granularity(category);
  for (auto role : call_roles(scene, call)) {
    if (try_label(call, role, g) != category) continue;
    const auto records = role_primitives(scene, call, role);
    for (size_t k = 0; k < records.size(); ++k) {
      emit(records[k]->per_datum_index.value_or(static_cast<int>(k)),
           full_render(scene, *records[k]));
    }
  }
  return out;
}

std::vector<InstanceMask> compose_instances(const TracedScene& scene,
                                            const TracedCall& call,
                                            Granularity granularity,
                                            std::vector<std::string>* skipped) {
  std::vector<InstanceMask> out;
  bool any = false;
  for (auto c : call_categories(scene, call)) {
    if (category_granularity(c) != granularity) continue;
    any = true;
    auto part = compose_instances(scene, call, c, skipped);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  if (!any) {
    fail(ErrorCode::kUnsupportedGranularity,
         std::string(granularity_name(granularity)) + " instances are not produced by call " +
             std::to_string(call.index) + " (" + call.api_name + ")");
  }
  return out;
}

SceneInstances synthesize_scene(const TracedScene& scene) {
  SceneInstances result;
  for (const auto& call : scene.calls) {
    const auto categories = call_categories(scene, call);
    if (categories.empty()) {
      result.warnings.push_back("call " + std::to_string(call.index) + " (" +
                                call.api_name + ") maps to no category; skipped");
      continue;
    }
    for (auto c : categories) {
      auto part = compose_instances(scene, call, c, &result.warnings);
      std::move(part.begin(), part.end(), std::back_inserter(result.instances));
    }
  }
  return result;
}

BBox tight_bbox(const Bitmap& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) fail(ErrorCode::kEmptyMask, "tight_bbox of an empty mask");
  return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 + 1),
          static_cast<double>(y1 + 1)};
}

Point representative_point(const Bitmap& mask) {
  int64_t sx = 0, sy = 0, n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  if (n == 0) fail(ErrorCode::kEmptyMask, "representative_point of an empty mask");
  // Distances scaled by n^2 stay exact, so ties resolve in scan order.
  __extension__ using Wide = __int128;
  Wide best = -1;
  Point p;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      const Wide dx = Wide(n) * x - sx, dy = Wide(n) * y - sy;
      const Wide d = dx * dx + dy * dy;
      if (best < 0 || d < best) {
        best = d;
        p = {x + 0.5, y + 0.5};
      }
    }
  }
  return p;
}

}  // namespace chartforge
