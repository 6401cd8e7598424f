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

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "chartforge/error.h"
#include "test_support.h"

namespace chartforge {
namespace {

using testing::ScratchDir;
using testing::traced_fixture;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no chartforge::Error thrown";
  return ErrorCode::kInvalidArgument;
}

RunConfig quick_config(double timeout_s = 60) {
  RunConfig cfg;
  cfg.timeout_s = timeout_s;
  return cfg;
}

constexpr const char* kPreamble =
    "import matplotlib.pyplot as plt\n"
    "fig, ax = plt.subplots(figsize=(3, 2))\n";

TEST(ParseMarkers, SingleMarker) {
  const std::string text =
      "import matplotlib.pyplot as plt\n"
      "\n\n\n\n"
      "x, y = [1, 2], [3, 4]\n"
      "ax.bar(x, y)  #1\n";
  const auto m = parse_markers(text);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.at("#1"), 7);
}

TEST(ParseMarkers, TwoMarkers) {
  std::string text;
  for (int i = 1; i <= 10; ++i) {
    if (i == 3) text += "ax.plot(x)  #1\n";
    else if (i == 9) text += "ax.bar(x, y)  #2\n";
    else text += "pass\n";
  }
  const auto m = parse_markers(text);
  EXPECT_EQ(m, (MarkerMap{{"#1", 3}, {"#2", 9}}));
}

TEST(ParseMarkers, DuplicateMarker) {
  const std::string text = "a = 1\nb = 2\nax.plot(x)  #1\nc = 3\nax.bar(x, y)  #1\n";
  EXPECT_EQ(code_of([&] { parse_markers(text); }), ErrorCode::kDuplicateMarker);
}

TEST(ParseMarkers, MalformedMarkers) {
  for (const char* bad : {"ax.plot(x)  #0\n", "ax.plot(x)  #1a\n", "ax.plot(x)  #01\n",
                          "ax.plot(x)  #-2\n", "ax.plot(x)  #2.5\n"}) {
    EXPECT_EQ(code_of([&] { parse_markers(bad); }), ErrorCode::kMalformedMarker) << bad;
  }
}

TEST(ParseMarkers, IgnoresStringsAndProse) {
  const std::string text =
      "s = \"value #1\"\n"
      "t = '''\n"
      "ax.plot(x)  #2\n"
      "'''\n"
      "ax.bar(x, y)  # see notes\n"
      "ax.plot(x)  # color #ff0000\n"
      "ax.scatter(x, y)  #3\n";
  const auto m = parse_markers(text);
  EXPECT_EQ(m, (MarkerMap{{"#3", 7}}));
}

TEST(ParseMarkers, MarkerIdSyntax) {
  EXPECT_TRUE(is_valid_marker_id("#1"));
  EXPECT_TRUE(is_valid_marker_id("#42"));
  EXPECT_FALSE(is_valid_marker_id("#0"));
  EXPECT_FALSE(is_valid_marker_id("#007"));
  EXPECT_FALSE(is_valid_marker_id("1"));
  EXPECT_FALSE(is_valid_marker_id("#"));
}

TEST(RunConfigTest, Validation) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.timeout_s = 0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kInvalidArgument);
  cfg.timeout_s = 10;
  cfg.render_scale = -1;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kInvalidArgument);

  const auto parsed = RunConfig::from_json({{"seed", 7}, {"render_scale", 72.0}});
  EXPECT_EQ(parsed.seed, 7);
  EXPECT_DOUBLE_EQ(parsed.render_scale, 72.0);
  EXPECT_DOUBLE_EQ(parsed.timeout_s, 60.0);
}

TEST(ExecuteScript, LoopInvocationCounts) {
  const std::string text = std::string(kPreamble) +
                           "for k in range(3):\n"
                           "    ax.bar([k], [k + 1])  #1\n";
  const auto scene = execute_script(text, quick_config());
  std::vector<int> counts;
  for (const auto& c : scene.calls) {
    ASSERT_EQ(c.marker, std::optional<std::string>("#1"));
    counts.push_back(c.invocation_count);
  }
  EXPECT_EQ(counts, (std::vector<int>{0, 1, 2}));

  const auto inv = primitive_inventory(scene, "#1");
  ASSERT_EQ(inv.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(inv[i].invocation_count, i);
    EXPECT_EQ(inv[i].primitive_ids.size(), 1u);
  }
  EXPECT_EQ(scene.marker_executions().at("#1"), 3);
}

TEST(ExecuteScript, UnmarkedCallsAreRecorded) {
  const std::string text = std::string(kPreamble) +
                           "ax.bar([1, 2], [3, 4])\n"
                           "ax.plot([1, 2], [2, 1])\n";
  const auto scene = execute_script(text, quick_config());
  ASSERT_EQ(scene.calls.size(), 2u);
  EXPECT_EQ(scene.calls[0].api_name, "bar");
  EXPECT_EQ(scene.calls[1].api_name, "plot");
  for (const auto& c : scene.calls) EXPECT_FALSE(c.marker.has_value());
  EXPECT_TRUE(scene.marker_map.empty());
}

TEST(ExecuteScript, NestedCallsRecordedOnce) {
  // errorbar draws through plot internally; only the outer call counts.
  const auto& scene = traced_fixture("errorbar");
  ASSERT_EQ(scene.calls.size(), 2u);
  EXPECT_EQ(scene.calls[0].api_name, "bar");
  EXPECT_EQ(scene.calls[1].api_name, "errorbar");
  std::set<int> indices;
  for (const auto& c : scene.calls) indices.insert(c.index);
  EXPECT_EQ(indices.size(), scene.calls.size());
}

TEST(ExecuteScript, Timeout) {
  const std::string text = "import time\nwhile True:\n    time.sleep(0.01)\n";
  EXPECT_EQ(code_of([&] { execute_script(text, quick_config(1.5)); }),
            ErrorCode::kExecTimeout);
}

TEST(ExecuteScript, ScriptRaises) {
  const std::string text = std::string(kPreamble) + "ax.bar([1], [2])  #1\nraise ValueError('x')\n";
  EXPECT_EQ(code_of([&] { execute_script(text, quick_config()); }), ErrorCode::kScriptError);
}

TEST(ExecuteScript, MarkerNeverExecuted) {
  const std::string text = std::string(kPreamble) +
                           "ax.bar([1], [2])  #1\n"
                           "if False:\n"
                           "    ax.plot([1, 2], [1, 2])  #2\n";
  EXPECT_EQ(code_of([&] { execute_script(text, quick_config()); }),
            ErrorCode::kNoMarkedCalls);
}

TEST(ExecuteScript, MarkerOnNonPlottingLine) {
  const std::string text = std::string(kPreamble) + "v = [1, 2]  #1\nax.bar(v, v)\n";
  EXPECT_EQ(code_of([&] { execute_script(text, quick_config()); }), ErrorCode::kScriptError);
}

TEST(ExecuteScript, Determinism) {
  const auto script = testing::script_path("full_box");  // draws random data
  const auto a = execute_script_file(script, quick_config());
  const auto b = execute_script_file(script, quick_config());
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.calls, b.calls);
  EXPECT_EQ(a.primitives, b.primitives);
  EXPECT_EQ(a.renders, b.renders);
  EXPECT_EQ(scene_to_json(a).dump(), scene_to_json(b).dump());
}

TEST(ExecuteScript, SeedChangesRandomData) {
  auto cfg = quick_config();
  const auto a = execute_script_file(testing::script_path("full_box"), cfg);
  cfg.seed = 99;
  const auto b = execute_script_file(testing::script_path("full_box"), cfg);
  EXPECT_NE(a.image, b.image);
}

TEST(ExecuteScript, RenderScaleSetsImageSize) {
  const auto& scene = traced_fixture(testing::fixture_dir() / "geometry" / "single_bar.py");
  EXPECT_EQ(scene.width(), 400);
  EXPECT_EQ(scene.height(), 300);
  EXPECT_DOUBLE_EQ(scene.render_scale, 100.0);
}

TEST(TracedSceneTest, StructuralInvariants) {
  for (const auto& script : testing::corpus_scripts()) {
    const auto& scene = traced_fixture(script);
    SCOPED_TRACE(script.filename().string());
    ASSERT_GT(scene.width(), 0);
    ASSERT_GT(scene.height(), 0);
    std::map<std::string, std::vector<int>> per_marker;
    for (size_t i = 0; i < scene.calls.size(); ++i) {
      const auto& c = scene.calls[i];
      EXPECT_EQ(c.index, static_cast<int>(i));
      EXPECT_FALSE(c.primitive_ids.empty());
      if (c.marker) per_marker[*c.marker].push_back(c.invocation_count);
      bool known_axes = false;
      for (const auto& sp : scene.subplots) {
        if (sp.id == c.axes_id) {
          known_axes = true;
          EXPECT_EQ(sp.kind, c.axes_kind);
        }
      }
      EXPECT_TRUE(known_axes);
      std::set<std::pair<std::string, int>> datum_keys;
      for (const auto& pid : c.primitive_ids) {
        const auto& p = scene.primitive(pid);
        EXPECT_EQ(p.parent_call, c.index);
        if (p.per_datum_index) {
          EXPECT_TRUE(datum_keys
                          .insert({std::string(role_name(p.role)), *p.per_datum_index})
                          .second);
        }
        EXPECT_TRUE(scene.renders.contains(pid));
      }
    }
    // Ordinality: counts per marker are exactly 0..n-1 in execution order.
    for (const auto& [marker, counts] : per_marker) {
      for (size_t k = 0; k < counts.size(); ++k) {
        EXPECT_EQ(counts[k], static_cast<int>(k)) << marker;
      }
    }
    for (const auto& [marker, line] : scene.marker_map) {
      EXPECT_TRUE(is_valid_marker_id(marker));
      EXPECT_GT(line, 0);
    }
  }
}

TEST(PrimitiveInventory, Errors) {
  const auto& scene = traced_fixture("vbar");
  EXPECT_EQ(code_of([&] { primitive_inventory(scene, "#9"); }), ErrorCode::kUnknownMarker);
  TracedScene copy = scene;
  copy.marker_map["#2"] = 3;
  EXPECT_EQ(code_of([&] { primitive_inventory(copy, "#2"); }), ErrorCode::kUnknownExecution);
  const auto inv = primitive_inventory(scene, "#1");
  ASSERT_EQ(inv.size(), 1u);
  EXPECT_EQ(inv[0].invocation_count, 0);
  EXPECT_EQ(inv[0].primitive_ids.size(), 5u);
}

TEST(SceneIo, RoundTrip) {
  const auto& scene = traced_fixture("line_points");
  ScratchDir dir("scene-io");
  save_scene(scene, dir.path(), "line_points");
  const auto back = load_scene(dir.path() / "line_points.json");
  EXPECT_EQ(back.image, scene.image);
  EXPECT_EQ(back.calls, scene.calls);
  EXPECT_EQ(back.primitives, scene.primitives);
  EXPECT_EQ(back.renders, scene.renders);
  EXPECT_EQ(back.marker_map, scene.marker_map);
  EXPECT_EQ(back.subplots, scene.subplots);
}

}  // namespace
}  // namespace chartforge
