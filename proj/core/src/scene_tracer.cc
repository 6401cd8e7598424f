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

#include "chartforge/scene_tracer.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chartforge/error.h"
#include "chartforge/rle.h"
#include "harness_source.h"
#include "subprocess.h"

namespace chartforge {
namespace {

constexpr int kSceneSchemaVersion = 1;

// Harness exit statuses, see core/harness/trace_harness.py.
constexpr int kExitScriptError = 3;
constexpr int kExitNoMarkedCalls = 4;

constexpr std::array<std::pair<PrimitiveRole, std::string_view>, 13> kRoleNames{{
    {PrimitiveRole::kLinePath, "line_path"},
    {PrimitiveRole::kMarkerSet, "marker_set"},
    {PrimitiveRole::kBarPatch, "bar_patch"},
    {PrimitiveRole::kBoxBody, "box_body"},
    {PrimitiveRole::kWhisker, "whisker"},
    {PrimitiveRole::kCap, "cap"},
    {PrimitiveRole::kMedian, "median"},
    {PrimitiveRole::kErrorbarLine, "errorbar_line"},
    {PrimitiveRole::kErrorbarCap, "errorbar_cap"},
    {PrimitiveRole::kWedge, "wedge"},
    {PrimitiveRole::kAreaPatch, "area_patch"},
    {PrimitiveRole::kBinPatch, "bin_patch"},
    {PrimitiveRole::kRectangle, "rectangle"},
}};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIOFailure, "cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIOFailure, "cannot open " + path.string());
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) fail(ErrorCode::kIOFailure, "cannot write " + path.string());
}

// Records the comment text of each physical line, skipping '#' inside string
// literals (including triple-quoted strings spanning lines).
std::vector<std::pair<int, std::string>> python_comments(std::string_view src) {
  std::vector<std::pair<int, std::string>> comments;
  int line = 1;
  size_t i = 0;
  char quote = 0;
  bool triple = false;
  while (i < src.size()) {
    const char c = src[i];
    if (quote != 0) {
      if (c == '\\' && i + 1 < src.size()) {
        if (src[i + 1] == '\n') ++line;
        i += 2;
        continue;
      }
      if (c == '\n') {
        ++line;
        if (!triple) quote = 0;  // unterminated single-line string
        ++i;
        continue;
      }
      if (c == quote) {
        if (!triple) {
          quote = 0;
          ++i;
          continue;
        }
        if (i + 2 < src.size() && src[i + 1] == quote && src[i + 2] == quote) {
          quote = 0;
          i += 3;
          continue;
        }
      }
      ++i;
      continue;
    }
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (c == '#') {
      size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      std::string text(src.substr(i, end - i));
      while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.pop_back();
      }
      comments.emplace_back(line, std::move(text));
      i = end;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      triple = i + 2 < src.size() && src[i + 1] == c && src[i + 2] == c;
      i += triple ? 3 : 1;
      continue;
    }
    ++i;
  }
  return comments;
}

bool looks_like_marker(std::string_view token) {
  if (token.size() < 2 || token[0] != '#') return false;
  size_t k = 1;
  if (token[k] == '-' || token[k] == '+') ++k;
  return k < token.size() && std::isdigit(static_cast<unsigned char>(token[k]));
}

AxesKind parse_axes_kind(const std::string& s) {
  if (s == "polar") return AxesKind::kPolar;
  if (s == "cartesian") return AxesKind::kCartesian;
  fail(ErrorCode::kSchemaError, "unknown axes kind '" + s + "'");
}

PrimitiveRole parse_role(const std::string& s) {
  auto role = role_from_name(s);
  if (!role) fail(ErrorCode::kSchemaError, "unknown primitive role '" + s + "'");
  return *role;
}

std::optional<int> optional_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<int>();
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

ArgSummary args_from_json(const nlohmann::json& j) {
  ArgSummary a;
  a.linestyle = j.value("linestyle", false);
  a.marker = optional_string(j, "marker");
  a.orientation = optional_string(j, "orientation");
  return a;
}

nlohmann::json args_to_json(const ArgSummary& a) {
  nlohmann::json j;
  j["linestyle"] = a.linestyle;
  j["marker"] = a.marker ? nlohmann::json(*a.marker) : nlohmann::json(nullptr);
  j["orientation"] =
      a.orientation ? nlohmann::json(*a.orientation) : nlohmann::json(nullptr);
  return j;
}

Bitmap mask_from_counts(const nlohmann::json& counts, int height, int width) {
  RleMask rle{height, width, counts.get<std::vector<uint32_t>>()};
  return decode_rle(rle);
}

void check_scene(const TracedScene& scene) {
  if (scene.image.empty()) fail(ErrorCode::kRenderMismatch, "scene image is empty");
  for (const auto& call : scene.calls) {
    for (const auto& id : call.primitive_ids) {
      auto it = scene.primitives.find(id);
      if (it == scene.primitives.end() || it->second.parent_call != call.index) {
        fail(ErrorCode::kSchemaError, "primitive " + id + " not owned by call " +
                                          std::to_string(call.index));
      }
    }
  }
  for (const auto& [id, render] : scene.renders) {
    for (const Bitmap* b : {&render.full,
                            render.line_only ? &*render.line_only : nullptr,
                            render.markers_only ? &*render.markers_only : nullptr}) {
      if (b != nullptr && (b->height() != scene.height() || b->width() != scene.width())) {
        fail(ErrorCode::kRenderMismatch,
             "isolation render of " + id + " does not match scene image size");
      }
    }
  }
}

// Scene as emitted by the Python harness.
TracedScene scene_from_harness(const nlohmann::json& j, RgbImage image,
                               const MarkerMap& markers, const RunConfig& config,
                               std::string source_name) {
  TracedScene scene;
  scene.source_name = std::move(source_name);
  scene.image = std::move(image);
  scene.marker_map = markers;
  scene.seed = config.seed;
  scene.render_scale = config.render_scale;
  const int h = j.at("height").get<int>();
  const int w = j.at("width").get<int>();
  if (h != scene.image.height() || w != scene.image.width()) {
    fail(ErrorCode::kRenderMismatch, "harness image size mismatch");
  }
  for (const auto& a : j.at("axes")) {
    SubplotInfo s;
    s.id = a.at("id").get<std::string>();
    s.kind = parse_axes_kind(a.at("kind").get<std::string>());
    s.bbox = a.at("bbox").get<std::array<double, 4>>();
    s.xlim = a.at("xlim").get<std::array<double, 2>>();
    s.ylim = a.at("ylim").get<std::array<double, 2>>();
    scene.subplots.push_back(std::move(s));
  }
  for (const auto& c : j.at("calls")) {
    TracedCall call;
    call.index = c.at("index").get<int>();
    call.marker = optional_string(c, "marker");
    call.api_name = c.at("api").get<std::string>();
    call.line = c.at("line").is_null() ? 0 : c.at("line").get<int>();
    call.invocation_count = c.at("invocation_count").get<int>();
    call.axes_id = c.at("axes_id").get<std::string>();
    call.axes_kind = parse_axes_kind(c.at("axes_kind").get<std::string>());
    call.args = args_from_json(c.at("args"));
    call.primitive_ids = c.at("primitives").get<std::vector<std::string>>();
    scene.calls.push_back(std::move(call));
  }
  for (const auto& p : j.at("primitives")) {
    PrimitiveRecord rec;
    rec.id = p.at("id").get<std::string>();
    rec.role = parse_role(p.at("role").get<std::string>());
    rec.parent_call = p.at("call").get<int>();
    rec.per_datum_index = optional_int(p, "index");
    rec.group = optional_int(p, "group");
    const auto& masks = p.at("masks");
    IsolationRender render;
    render.full = mask_from_counts(masks.at("full"), h, w);
    if (masks.contains("line_only")) {
      render.line_only = mask_from_counts(masks.at("line_only"), h, w);
    }
    if (masks.contains("markers_only")) {
      render.markers_only = mask_from_counts(masks.at("markers_only"), h, w);
    }
    scene.renders.emplace(rec.id, std::move(render));
    scene.primitives.emplace(rec.id, std::move(rec));
  }
  return scene;
}

}  // namespace

std::string_view axes_kind_name(AxesKind kind) {
  return kind == AxesKind::kPolar ? "polar" : "cartesian";
}

std::string_view role_name(PrimitiveRole role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unknown";
}

std::optional<PrimitiveRole> role_from_name(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

bool is_valid_marker_id(std::string_view marker) {
  if (marker.size() < 2 || marker[0] != '#' || marker[1] == '0') return false;
  return std::all_of(marker.begin() + 1, marker.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

MarkerMap parse_markers(std::string_view script_text) {
  MarkerMap markers;
  for (const auto& [line, comment] : python_comments(script_text)) {
    const auto pos = comment.find_last_of(" \t");
    const std::string token =
        pos == std::string::npos ? comment : comment.substr(pos + 1);
    if (!looks_like_marker(token)) continue;
    if (!is_valid_marker_id(token)) {
      fail(ErrorCode::kMalformedMarker,
           "'" + token + "' on line " + std::to_string(line));
    }
    auto [it, inserted] = markers.emplace(token, line);
    if (!inserted) {
      fail(ErrorCode::kDuplicateMarker,
           token + " on lines " + std::to_string(it->second) + " and " +
               std::to_string(line));
    }
  }
  return markers;
}

const PrimitiveRecord& TracedScene::primitive(std::string_view id) const {
  auto it = primitives.find(std::string(id));
  if (it == primitives.end()) {
    fail(ErrorCode::kInvalidArgument, "unknown primitive " + std::string(id));
  }
  return it->second;
}

std::map<std::string, int> TracedScene::marker_executions() const {
  std::map<std::string, int> counts;
  for (const auto& [marker, line] : marker_map) counts[marker] = 0;
  for (const auto& call : calls) {
    if (call.marker) ++counts[*call.marker];
  }
  return counts;
}

void RunConfig::validate() const {
  if (!(timeout_s > 0.0) || !std::isfinite(timeout_s)) {
    fail(ErrorCode::kInvalidArgument, "timeout_s must be > 0");
  }
  if (!(render_scale > 0.0) || !std::isfinite(render_scale)) {
    fail(ErrorCode::kInvalidArgument, "render_scale must be > 0");
  }
}

RunConfig RunConfig::from_json(const nlohmann::json& j) { return from_json(j, RunConfig()); }

RunConfig RunConfig::from_json(const nlohmann::json& j, RunConfig base) {
  try {
    if (j.contains("seed")) base.seed = j.at("seed").get<int64_t>();
    if (j.contains("timeout_s")) base.timeout_s = j.at("timeout_s").get<double>();
    if (j.contains("render_scale")) base.render_scale = j.at("render_scale").get<double>();
    if (j.contains("out_dir")) base.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("python")) base.python = j.at("python").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaError, std::string("bad run config: ") + e.what());
  }
  base.validate();
  return base;
}

TracedScene execute_script(std::string_view script_text, const RunConfig& config,
                           std::string source_name) {
  config.validate();
  const MarkerMap markers = parse_markers(script_text);

  std::string file_name = std::filesystem::path(source_name).filename().string();
  if (file_name.empty()) file_name = "script.py";

  internal::TempDir work("chartforge-trace");
  const auto script_path = work.path() / file_name;
  const auto harness_path = work.path() / "chartforge_trace_harness.py";
  const auto out_dir = work.path() / "out";
  std::filesystem::create_directory(out_dir);
  write_file(script_path, script_text);
  write_file(harness_path, internal::kTraceHarnessSource);

  nlohmann::json marker_json = nlohmann::json::object();
  for (const auto& [id, line] : markers) marker_json[id] = line;

  std::ostringstream dpi;
  dpi.precision(17);
  dpi << config.render_scale;
  const std::vector<std::string> argv = {
      config.python,        harness_path.string(), "--script",
      script_path.string(), "--out-dir",           out_dir.string(),
      "--seed",             std::to_string(config.seed),
      "--dpi",              dpi.str(),
      "--markers",          marker_json.dump()};
  const std::map<std::string, std::string> env = {
      {"CHARTFORGE_HEADLESS", "1"},
      {"MPLBACKEND", "Agg"},
      {"PYTHONHASHSEED", "0"},
      {"PYTHONDONTWRITEBYTECODE", "1"},
  };
  const auto timeout = std::chrono::milliseconds(
      static_cast<int64_t>(std::ceil(config.timeout_s * 1000.0)));
  const auto result = internal::run_process(argv, env, out_dir,
                                            work.path() / "harness.log", timeout);
  if (result.timed_out) {
    fail(ErrorCode::kExecTimeout, file_name + " exceeded " +
                                      std::to_string(config.timeout_s) + " s");
  }
  if (result.exit_code != 0) {
    std::string message = result.output;
    std::string kind;
    const auto error_path = out_dir / "error.json";
    if (std::filesystem::exists(error_path)) {
      try {
        const auto err = nlohmann::json::parse(read_file(error_path));
        kind = err.value("kind", "");
        message = err.value("message", message);
      } catch (const nlohmann::json::exception&) {
      }
    }
    const std::string where = file_name + ": ";
    if (result.exit_code == kExitNoMarkedCalls || kind == "no_marked_calls") {
      fail(ErrorCode::kNoMarkedCalls, where + message);
    }
    if (result.exit_code == kExitScriptError || kind == "script_error") {
      fail(ErrorCode::kScriptError, where + message);
    }
    fail(ErrorCode::kHarnessError, where + "exit status " +
                                       std::to_string(result.exit_code) + "\n" +
                                       message);
  }

  nlohmann::json scene_json;
  try {
    scene_json = nlohmann::json::parse(read_file(out_dir / "scene.json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kHarnessError, std::string("unreadable harness output: ") + e.what());
  }
  const int h = scene_json.at("height").get<int>();
  const int w = scene_json.at("width").get<int>();
  const std::string raw = read_file(out_dir / "image.rgb");
  RgbImage image(h, w, std::vector<uint8_t>(raw.begin(), raw.end()));
  TracedScene scene =
      scene_from_harness(scene_json, std::move(image), markers, config, file_name);
  check_scene(scene);
  return scene;
}

TracedScene execute_script_file(const std::filesystem::path& script,
                                const RunConfig& config) {
  return execute_script(read_file(script), config, script.filename().string());
}

std::vector<Execution> primitive_inventory(const TracedScene& scene,
                                           std::string_view marker) {
  const std::string key(marker);
  if (!scene.marker_map.contains(key)) {
    fail(ErrorCode::kUnknownMarker, key + " is not present in the script");
  }
  std::vector<Execution> out;
  for (const auto& call : scene.calls) {
    if (call.marker == key) {
      out.push_back({call.invocation_count, call.index, call.primitive_ids});
    }
  }
  if (out.empty()) fail(ErrorCode::kUnknownExecution, key + " never executed");
  std::sort(out.begin(), out.end(), [](const Execution& a, const Execution& b) {
    return a.invocation_count < b.invocation_count;
  });
  return out;
}

nlohmann::json scene_to_json(const TracedScene& scene) {
  nlohmann::json j;
  j["schema_version"] = kSceneSchemaVersion;
  j["source"] = scene.source_name;
  j["height"] = scene.height();
  j["width"] = scene.width();
  j["seed"] = scene.seed;
  j["render_scale"] = scene.render_scale;
  j["marker_map"] = nlohmann::json::object();
  for (const auto& [id, line] : scene.marker_map) j["marker_map"][id] = line;
  j["subplots"] = nlohmann::json::array();
  for (const auto& s : scene.subplots) {
    j["subplots"].push_back({{"id", s.id},
                             {"kind", axes_kind_name(s.kind)},
                             {"bbox", s.bbox},
                             {"xlim", s.xlim},
                             {"ylim", s.ylim}});
  }
  j["calls"] = nlohmann::json::array();
  j["primitives"] = nlohmann::json::array();
  for (const auto& c : scene.calls) {
    j["calls"].push_back(
        {{"index", c.index},
         {"marker", c.marker ? nlohmann::json(*c.marker) : nlohmann::json(nullptr)},
         {"api", c.api_name},
         {"line", c.line},
         {"invocation_count", c.invocation_count},
         {"axes_id", c.axes_id},
         {"axes_kind", axes_kind_name(c.axes_kind)},
         {"args", args_to_json(c.args)},
         {"primitives", c.primitive_ids}});
    for (const auto& id : c.primitive_ids) {
      const auto& p = scene.primitives.at(id);
      nlohmann::json masks;
      const auto& render = scene.renders.at(id);
      masks["full"] = rle_to_json(encode_rle(render.full));
      if (render.line_only) masks["line_only"] = rle_to_json(encode_rle(*render.line_only));
      if (render.markers_only) {
        masks["markers_only"] = rle_to_json(encode_rle(*render.markers_only));
      }
      j["primitives"].push_back(
          {{"id", p.id},
           {"role", role_name(p.role)},
           {"call", p.parent_call},
           {"per_datum_index", p.per_datum_index ? nlohmann::json(*p.per_datum_index)
                                                 : nlohmann::json(nullptr)},
           {"group", p.group ? nlohmann::json(*p.group) : nlohmann::json(nullptr)},
           {"masks", std::move(masks)}});
    }
  }
  return j;
}

TracedScene scene_from_json(const nlohmann::json& j, RgbImage image) {
  try {
    if (j.value("schema_version", 0) != kSceneSchemaVersion) {
      fail(ErrorCode::kSchemaError, "unsupported scene schema_version");
    }
    TracedScene scene;
    scene.source_name = j.value("source", "");
    scene.image = std::move(image);
    scene.seed = j.at("seed").get<int64_t>();
    scene.render_scale = j.at("render_scale").get<double>();
    if (j.at("height").get<int>() != scene.height() ||
        j.at("width").get<int>() != scene.width()) {
      fail(ErrorCode::kRenderMismatch, "scene image size mismatch");
    }
    for (const auto& [id, line] : j.at("marker_map").items()) {
      scene.marker_map[id] = line.get<int>();
    }
    for (const auto& a : j.at("subplots")) {
      SubplotInfo s;
      s.id = a.at("id").get<std::string>();
      s.kind = parse_axes_kind(a.at("kind").get<std::string>());
      s.bbox = a.at("bbox").get<std::array<double, 4>>();
      s.xlim = a.at("xlim").get<std::array<double, 2>>();
      s.ylim = a.at("ylim").get<std::array<double, 2>>();
      scene.subplots.push_back(std::move(s));
    }
    for (const auto& c : j.at("calls")) {
      TracedCall call;
      call.index = c.at("index").get<int>();
      call.marker = optional_string(c, "marker");
      call.api_name = c.at("api").get<std::string>();
      call.line = c.at("line").get<int>();
      call.invocation_count = c.at("invocation_count").get<int>();
      call.axes_id = c.at("axes_id").get<std::string>();
      call.axes_kind = parse_axes_kind(c.at("axes_kind").get<std::string>());
      call.args = args_from_json(c.at("args"));
      call.primitive_ids = c.at("primitives").get<std::vector<std::string>>();
      scene.calls.push_back(std::move(call));
    }
    for (const auto& p : j.at("primitives")) {
      PrimitiveRecord rec;
      rec.id = p.at("id").get<std::string>();
      rec.role = parse_role(p.at("role").get<std::string>());
      rec.parent_call = p.at("call").get<int>();
      rec.per_datum_index = optional_int(p, "per_datum_index");
      rec.group = optional_int(p, "group");
      const auto& masks = p.at("masks");
      IsolationRender render;
      render.full = decode_rle(rle_from_json(masks.at("full")));
      if (masks.contains("line_only")) {
        render.line_only = decode_rle(rle_from_json(masks.at("line_only")));
      }
      if (masks.contains("markers_only")) {
        render.markers_only = decode_rle(rle_from_json(masks.at("markers_only")));
      }
      scene.renders.emplace(rec.id, std::move(render));
      scene.primitives.emplace(rec.id, std::move(rec));
    }
    check_scene(scene);
    return scene;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaError, std::string("bad scene JSON: ") + e.what());
  }
}

void save_scene(const TracedScene& scene, const std::filesystem::path& dir,
                const std::string& stem) {
  std::filesystem::create_directories(dir);
  auto j = scene_to_json(scene);
  j["image"] = stem + ".png";
  write_file(dir / (stem + ".json"), j.dump(1) + "\n");
  write_png(scene.image, dir / (stem + ".png"));
}

TracedScene load_scene(const std::filesystem::path& json_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(json_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaError, json_path.string() + ": " + e.what());
  }
  const auto image_name = j.value("image", json_path.stem().string() + ".png");
  return scene_from_json(j, read_png(json_path.parent_path() / image_name));
}

}  // namespace chartforge
