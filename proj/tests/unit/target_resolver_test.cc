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

#include "chartforge/target_resolver.h"

#include <gtest/gtest.h>

#include "chartforge/dataset_io.h"
#include "chartforge/error.h"
#include "chartforge/mask_forge.h"
#include "test_support.h"

namespace chartforge {
namespace {

using testing::rect_mask;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no chartforge::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TargetSpec one(std::string line, std::optional<int> inv,
               std::optional<std::vector<int>> idx = std::nullopt) {
  return TargetSpec{{TargetEntry{std::move(line), inv, std::move(idx)}}};
}

// #1: a 5-bar call that ran twice; #2: one errorbar; #3: never ran.
ResolveContext sample_context() {
  ResolveContext ctx;
  ctx.marker_executions = {{"#1", 2}, {"#2", 1}, {"#3", 0}};
  for (int inv = 0; inv < 2; ++inv) {
    for (int i = 0; i < 5; ++i) {
      ctx.instances.push_back({std::to_string(inv) + ":VBar:" + std::to_string(i),
                               ElementCategory::kVBar, "#1", inv, i});
    }
  }
  ctx.instances.push_back({"2:ErrorBar:0", ElementCategory::kErrorBar, "#2", 0, 0});
  ctx.instances.push_back({"2:LinePoints:0", ElementCategory::kLinePoints, "#2", 0, 0});
  ctx.instances.push_back({"2:LinePoints:1", ElementCategory::kLinePoints, "#2", 0, 1});
  return ctx;
}

TEST(ParseTargetJson, TemplateExamples) {
  const auto a = parse_target_json(
      R"({"results":[{"line":"#1","invocation_count":2,"element_indices":null}]})");
  ASSERT_EQ(a.results.size(), 1u);
  EXPECT_EQ(a.results[0].line, "#1");
  EXPECT_EQ(a.results[0].invocation_count, 2);
  EXPECT_FALSE(a.results[0].element_indices.has_value());

  const auto b = parse_target_json(
      R"({"results":[{"line":"#1","invocation_count":5,"element_indices":[0,1,2]}]})");
  EXPECT_EQ(b.results[0].element_indices, (std::vector<int>{0, 1, 2}));

  EXPECT_EQ(parse_target_json(target_spec_to_json(b)), b);
}

TEST(ParseTargetJson, SchemaErrors) {
  for (const char* bad : {
           R"({"results":[]})",
           R"({"result":[{"line":"#1","invocation_count":0}]})",
           R"({"results":[{"line":"1","invocation_count":0}]})",
           R"({"results":[{"line":"#0","invocation_count":0}]})",
           R"({"results":[{"line":"#1","invocation_count":-1}]})",
           R"({"results":[{"line":"#1","invocation_count":0,"element_indices":[]}]})",
           R"({"results":[{"line":"#1","invocation_count":0,"element_indices":[1,1]}]})",
           R"({"results":[{"line":"#1","invocation_count":0,"element_indices":[-1]}]})",
           R"(not json)",
       }) {
    EXPECT_EQ(code_of([&] { parse_target_json(std::string_view(bad)); }),
              ErrorCode::kSchemaError)
        << bad;
  }
}

TEST(ParseTargetJson, NullInvocationCanonicalization) {
  const std::map<std::string, int> runs = {{"#1", 1}, {"#2", 3}};
  const auto spec = parse_target_json(
      R"({"results":[{"line":"#1","invocation_count":null,"element_indices":null}]})", &runs);
  EXPECT_EQ(spec.results[0].invocation_count, 0);
  EXPECT_EQ(code_of([&] {
              parse_target_json(
                  R"({"results":[{"line":"#2","invocation_count":null,"element_indices":null}]})",
                  &runs);
            }),
            ErrorCode::kAmbiguousNullInvocation);
  EXPECT_EQ(code_of([&] { canonicalize_spec(one("#5", std::nullopt), runs); }),
            ErrorCode::kUnknownExecution);
}

TEST(ResolveTargets, Examples) {
  const auto ctx = sample_context();
  EXPECT_EQ(resolve_targets(ctx, one("#2", 0), ElementCategory::kErrorBar),
            (std::vector<std::string>{"2:ErrorBar:0"}));
  EXPECT_EQ(resolve_targets(ctx, one("#1", 0, std::vector<int>{0, 2}), ElementCategory::kVBar),
            (std::vector<std::string>{"0:VBar:0", "0:VBar:2"}));
  EXPECT_EQ(resolve_targets(ctx, one("#1", 1, std::vector<int>{4}), ElementCategory::kVBar),
            (std::vector<std::string>{"1:VBar:4"}));
  EXPECT_EQ(code_of([&] { resolve_targets(ctx, one("#1", 3), ElementCategory::kVBar); }),
            ErrorCode::kUnknownExecution);
}

TEST(ResolveTargets, Errors) {
  const auto ctx = sample_context();
  EXPECT_EQ(code_of([&] { resolve_targets(ctx, one("#1", 0), ElementCategory::kVBar); }),
            ErrorCode::kSingletonViolation);
  EXPECT_EQ(code_of([&] {
              resolve_targets(ctx, one("#1", 0, std::vector<int>{5}), ElementCategory::kVBar);
            }),
            ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([&] { resolve_targets(ctx, one("#1", 0, std::vector<int>{0}),
                                          ElementCategory::kHBar); }),
            ErrorCode::kCategoryMismatch);
  EXPECT_EQ(code_of([&] { resolve_targets(ctx, one("#3", 0), ElementCategory::kVBar); }),
            ErrorCode::kUnknownExecution);
  EXPECT_EQ(code_of([&] { resolve_targets(ctx, one("#1", std::nullopt, std::vector<int>{0}),
                                          ElementCategory::kVBar); }),
            ErrorCode::kAmbiguousNullInvocation);
  EXPECT_EQ(code_of([&] { resolve_targets(ctx, TargetSpec{}, ElementCategory::kVBar); }),
            ErrorCode::kSchemaError);
}

TEST(ResolveTargets, SetSemantics) {
  const auto ctx = sample_context();
  TargetSpec spec;
  spec.results.push_back({"#1", 0, std::vector<int>{3, 1}});
  spec.results.push_back({"#1", 0, std::vector<int>{1}});
  spec.results.push_back({"#1", 1, std::vector<int>{0}});
  const auto ids = resolve_targets(ctx, spec, ElementCategory::kVBar);
  EXPECT_EQ(ids, (std::vector<std::string>{"0:VBar:3", "0:VBar:1", "1:VBar:0"}));
}

TEST(ResolveTargets, FixtureScene) {
  const auto& scene = testing::traced_fixture("errorbar");
  const auto ids =
      resolve_targets(scene, one("#1", std::nullopt, std::vector<int>{2, 4}),
                      ElementCategory::kErrorBar);
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(ids[0], "1:ErrorBar:2");
  EXPECT_EQ(ids[1], "1:ErrorBar:4");
  EXPECT_EQ(code_of([&] { resolve_targets(scene, one("#1", 0), ElementCategory::kErrorBar); }),
            ErrorCode::kSingletonViolation);
}

TEST(MaterializeFormats, AlignedTriples) {
  std::vector<InstanceMask> instances;
  for (int i = 0; i < 4; ++i) {
    InstanceMask m;
    m.instance_id = "0:VBar:" + std::to_string(i);
    m.category = ElementCategory::kVBar;
    m.bitmap = rect_mask(40, 60, 10 * i, 5, 10 * i + 6, 30);
    instances.push_back(m);
  }
  const auto f = materialize_formats(instances, {"0:VBar:3", "0:VBar:0", "0:VBar:2"});
  ASSERT_EQ(f.points.size(), 3u);
  ASSERT_EQ(f.bboxes.size(), 3u);
  ASSERT_EQ(f.masks.size(), 3u);
  EXPECT_EQ(f.bboxes[0], (BBox{30, 5, 36, 30}));
  EXPECT_EQ(f.bboxes[1], (BBox{0, 5, 6, 30}));
  EXPECT_EQ(f.masks[2], instances[2].bitmap);
  for (size_t k = 0; k < 3; ++k) {
    EXPECT_TRUE(f.masks[k].at(int(f.points[k].x), int(f.points[k].y)));
  }

  EXPECT_EQ(code_of([&] { materialize_formats(instances, {}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([&] { materialize_formats(instances, {"9:VBar:0"}); }),
            ErrorCode::kDanglingReference);
  instances[1].category = ElementCategory::kHBar;
  EXPECT_EQ(code_of([&] { materialize_formats(instances, {"0:VBar:0", "0:VBar:1"}); }),
            ErrorCode::kCategoryMismatch);
}

TEST(MaterializeFormats, ThinMedianBoxHasArea) {
  const auto& scene = testing::traced_fixture("full_box");
  const auto medians = compose_instances(scene, scene.calls[0], ElementCategory::kBoxMedianLine);
  const auto f = materialize_formats(medians, {medians[0].instance_id});
  EXPECT_GE(f.bboxes[0].area(), 1.0);
  EXPECT_TRUE(f.bboxes[0].valid());
}

TEST(MaterializeFormats, FixtureBarMatchesTransform) {
  const auto& scene =
      testing::traced_fixture(testing::fixture_dir() / "geometry" / "single_bar.py");
  const auto synth = synthesize_scene(scene);
  const auto ids = resolve_targets(make_context(scene, synth.instances), one("#1", 0),
                                   ElementCategory::kVBar);
  const auto f = materialize_formats(synth.instances, ids);
  // Axes span x 100..300 for x in [0, 4] and y 240..60 for y in [0, 5].
  EXPECT_NEAR(f.bboxes[0].x_min, 175.0, 2.0);
  EXPECT_NEAR(f.bboxes[0].x_max, 225.0, 2.0);
  EXPECT_NEAR(f.bboxes[0].y_min, 132.0, 2.0);
  EXPECT_NEAR(f.bboxes[0].y_max, 240.0, 2.0);
}

TEST(ClueLabels, Vocabulary) {
  const auto c = clue_labels_from_json(
      {{"primary", {"data", "visual"}}, {"subtypes", {"color_attributes"}}, {"hybrid", true}});
  EXPECT_EQ(c.primary.size(), 2u);
  EXPECT_TRUE(c.hybrid);
  EXPECT_EQ(clue_labels_from_json(clue_labels_to_json(c)), c);
  EXPECT_EQ(code_of([] { clue_labels_from_json({{"primary", {"semantic"}}}); }),
            ErrorCode::kSchemaError);
  EXPECT_EQ(code_of([] { clue_labels_from_json({{"subtypes", {"font_size"}}}); }),
            ErrorCode::kSchemaError);
  // 4 data, 4 visual and 5 textual/localization subtypes.
  EXPECT_EQ(kClueSubtypes.size(), 13u);
  EXPECT_EQ(kPrimaryClues.size(), 3u);
}

TEST(GroundingSampleJson, RoundTrip) {
  GroundingSample s;
  s.id = "s1";
  s.image_id = "img";
  s.expression = "the two tallest bars";
  s.category = ElementCategory::kVBar;
  s.clue_labels.primary = {"data"};
  s.clue_labels.subtypes = {"rank_band_set_selection"};
  s.targets = {"img/0:VBar:1", "img/0:VBar:3"};
  EXPECT_EQ(sample_from_json(sample_to_json(s)), s);
}

}  // namespace
}  // namespace chartforge
