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

#ifndef CHARTFORGE_SCENE_TRACER_H_
#define CHARTFORGE_SCENE_TRACER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/bitmap.h"
#include "chartforge/raster.h"

namespace chartforge {

// Marker id ("#k") -> 1-based source line.
using MarkerMap = std::map<std::string, int>;

// Finds trailing "#k" comment markers. A trailing comment whose token starts
// with a digit (or a sign followed by a digit) is a marker candidate; it must
// be a positive integer without leading zeros. Comments inside string
// literals are ignored.
MarkerMap parse_markers(std::string_view script_text);

// True for "#1", "#2", ...
bool is_valid_marker_id(std::string_view marker);

enum class AxesKind { kCartesian, kPolar };

std::string_view axes_kind_name(AxesKind kind);

enum class PrimitiveRole {
  kLinePath,
  kMarkerSet,
  kBarPatch,
  kBoxBody,
  kWhisker,
  kCap,
  kMedian,
  kErrorbarLine,
  kErrorbarCap,
  kWedge,
  kAreaPatch,
  kBinPatch,
  kRectangle,
};

std::string_view role_name(PrimitiveRole role);
std::optional<PrimitiveRole> role_from_name(std::string_view name);

// Styling facts read from the call's artists once the figure is final.
struct ArgSummary {
  bool linestyle = false;
  std::optional<std::string> marker;
  std::optional<std::string> orientation;

  friend bool operator==(const ArgSummary&, const ArgSummary&) = default;
};

struct TracedCall {
  int index = 0;  // position in execution order
  std::optional<std::string> marker;
  std::string api_name;
  int line = 0;
  // Executions of the same source line before this one.
  int invocation_count = 0;
  std::string axes_id;
  AxesKind axes_kind = AxesKind::kCartesian;
  ArgSummary args;
  std::vector<std::string> primitive_ids;

  friend bool operator==(const TracedCall&, const TracedCall&) = default;
};

// One drawable piece returned by a traced call.
//
// marker_set records are single marker glyphs; `group` names the series
// (line_path per_datum_index) they belong to. Whiskers and caps are stored
// flat; box i owns whiskers/caps 2i and 2i+1.
struct PrimitiveRecord {
  std::string id;
  PrimitiveRole role = PrimitiveRole::kLinePath;
  int parent_call = 0;
  std::optional<int> per_datum_index;
  std::optional<int> group;

  friend bool operator==(const PrimitiveRecord&, const PrimitiveRecord&) = default;
};

// Isolation renders of one primitive, binarized at alpha > 0. Line series
// with both a stroke and markers also carry the two single-style renders;
// `full` is then their union.
struct IsolationRender {
  Bitmap full;
  std::optional<Bitmap> line_only;
  std::optional<Bitmap> markers_only;

  friend bool operator==(const IsolationRender&, const IsolationRender&) = default;
};

struct SubplotInfo {
  std::string id;
  AxesKind kind = AxesKind::kCartesian;
  std::array<double, 4> bbox{};  // pixels, x0 y0 x1 y1, origin top-left
  std::array<double, 2> xlim{};
  std::array<double, 2> ylim{};

  friend bool operator==(const SubplotInfo&, const SubplotInfo&) = default;
};

struct TracedScene {
  std::string source_name;
  RgbImage image;
  std::vector<SubplotInfo> subplots;
  std::vector<TracedCall> calls;
  std::map<std::string, PrimitiveRecord> primitives;
  std::map<std::string, IsolationRender> renders;
  MarkerMap marker_map;
  int64_t seed = 0;
  double render_scale = 100.0;

  int height() const { return image.height(); }
  int width() const { return image.width(); }

  const PrimitiveRecord& primitive(std::string_view id) const;
  // Executions of each marker (0 for markers that never ran).
  std::map<std::string, int> marker_executions() const;
};

struct RunConfig {
  int64_t seed = 0;
  double timeout_s = 60.0;
  double render_scale = 100.0;  // dots per inch
  std::filesystem::path out_dir = ".";
  std::string python = "python3";

  // kInvalidArgument unless timeout_s > 0 and render_scale > 0.
  void validate() const;

  // Reads seed / timeout_s / render_scale / out_dir / python when present.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
};

// Runs the script in a fresh interpreter with the tracing harness. Throws
// kExecTimeout, kScriptError, kNoMarkedCalls, kHarnessError, or the marker
// parse errors.
TracedScene execute_script(std::string_view script_text, const RunConfig& config,
                           std::string source_name = "script.py");
TracedScene execute_script_file(const std::filesystem::path& script,
                                const RunConfig& config);

struct Execution {
  int invocation_count = 0;
  int call_index = 0;
  std::vector<std::string> primitive_ids;
};

// All executions of a marked line ordered by invocation_count. Throws
// kUnknownMarker for markers absent from the script and kUnknownExecution for
// markers that never ran.
std::vector<Execution> primitive_inventory(const TracedScene& scene,
                                           std::string_view marker);

nlohmann::json scene_to_json(const TracedScene& scene);
// `image` supplies the raster; its size must match the JSON.
TracedScene scene_from_json(const nlohmann::json& j, RgbImage image);

// Writes <dir>/<stem>.json and <dir>/<stem>.png.
void save_scene(const TracedScene& scene, const std::filesystem::path& dir,
                const std::string& stem);
TracedScene load_scene(const std::filesystem::path& json_path);

}  // namespace chartforge

#endif  // CHARTFORGE_SCENE_TRACER_H_
