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

#include "chartforge/som_pipeline.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "chartforge/error.h"
#include "chartforge/eval_core.h"
#include "chartforge/rle.h"
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

constexpr int kH = 60;
constexpr int kW = 120;
const RgbImage kDark(kH, kW, Rgb{40, 60, 90});

std::vector<std::string> ids(const std::vector<Candidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.id);
  return out;
}

Candidate pixels(std::string id, int n, int x0, int y0) {
  Bitmap b(kH, kW);
  for (int i = 0; i < n; ++i) b.set(x0 + i % 5, y0 + i / 5);
  return {std::move(id), b};
}

TEST(FilterCandidates, AreaThreshold) {
  const auto kept = filter_candidates({pixels("nine", 9, 0, 0), pixels("ten", 10, 20, 0)}, kDark);
  EXPECT_EQ(ids(kept), (std::vector<std::string>{"ten"}));
}

TEST(FilterCandidates, DedupThreshold) {
  // A w x 5 rectangle against itself shifted one column has IoU (w-1)/(w+1).
  auto pair = [](int w, int y) {
    return std::vector<Candidate>{{"a", rect_mask(kH, kW, 10, y, 10 + w, y + 5)},
                                  {"b", rect_mask(kH, kW, 11, y, 11 + w, y + 5)}};
  };
  const auto p91 = pair(21, 0);  // 20/22
  ASSERT_NEAR(mask_iou(p91[0].mask, p91[1].mask), 0.91, 0.001);
  const auto r91 = filter_candidates_detailed(p91, kDark);
  EXPECT_EQ(ids(r91.kept), (std::vector<std::string>{"a"}));
  ASSERT_EQ(r91.removed.size(), 1u);
  EXPECT_EQ(r91.removed[0], (std::pair<std::string, std::string>{"b", "dedup"}));

  const auto p89 = pair(17, 0);  // 16/18
  ASSERT_NEAR(mask_iou(p89[0].mask, p89[1].mask), 0.89, 0.002);
  EXPECT_EQ(filter_candidates(p89, kDark).size(), 2u);

  const auto p90 = pair(19, 0);  // exactly 18/20 is not a duplicate
  ASSERT_EQ(mask_iou(p90[0].mask, p90[1].mask), 0.9);
  EXPECT_EQ(filter_candidates(p90, kDark).size(), 2u);
}

TEST(FilterCandidates, CompositeThreshold) {
  // whole = [10, 30) x [10, 20), 200 px; left and right stick out of it so
  // only the whole can be a composite.
  auto build = [](int missing) {
    Bitmap right = rect_mask(kH, kW, 20, 10, 40, 20);
    for (int k = 0; k < missing; ++k) right.set(20 + k, 10, false);
    return std::vector<Candidate>{{"whole", rect_mask(kH, kW, 10, 10, 30, 20)},
                                  {"left", rect_mask(kH, kW, 0, 10, 20, 20)},
                                  {"right", right}};
  };
  const auto removed = filter_candidates_detailed(build(3), kDark);  // 197 / 200
  EXPECT_EQ(ids(removed.kept), (std::vector<std::string>{"left", "right"}));
  ASSERT_EQ(removed.removed.size(), 1u);
  EXPECT_EQ(removed.removed[0].second, "composite");
  const auto kept = filter_candidates(build(6), kDark);  // 194 / 200
  EXPECT_EQ(ids(kept), (std::vector<std::string>{"whole", "left", "right"}));
}

TEST(FilterCandidates, PartsInsideSurvivingWholeAreComposite) {
  // Largest first: the whole is not covered, then each part is fully covered
  // by the whole.
  const std::vector<Candidate> cs = {{"whole", rect_mask(kH, kW, 10, 10, 30, 20)},
                                     {"left", rect_mask(kH, kW, 10, 10, 20, 20)},
                                     {"right", rect_mask(kH, kW, 20, 10, 28, 20)}};
  const auto r = filter_candidates_detailed(cs, kDark);
  EXPECT_EQ(ids(r.kept), (std::vector<std::string>{"whole"}));
}

TEST(FilterCandidates, WhiteThreshold) {
  RgbImage img(kH, kW, Rgb{30, 30, 30});
  // 100-px candidates, 96 of their pixels near white.
  auto paint = [&](int x0, uint8_t v) {
    int painted = 0;
    for (int y = 0; y < 10; ++y) {
      for (int x = x0; x < x0 + 10; ++x) {
        if (painted++ < 96) img.set(x, y, {v, v, v});
      }
    }
  };
  paint(0, 245);
  paint(20, 244);
  const std::vector<Candidate> cs = {{"w245", rect_mask(kH, kW, 0, 0, 10, 10)},
                                     {"w244", rect_mask(kH, kW, 20, 0, 30, 10)}};
  const auto r = filter_candidates_detailed(cs, img);
  EXPECT_EQ(ids(r.kept), (std::vector<std::string>{"w244"}));
  ASSERT_EQ(r.removed.size(), 1u);
  EXPECT_EQ(r.removed[0], (std::pair<std::string, std::string>{"w245", "white"}));
}

TEST(FilterCandidates, ConfigAndErrors) {
  FilterConfig bad;
  bad.dedup_iou = 0.0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kInvalidArgument);
  bad = {};
  bad.min_area_px = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kInvalidArgument);
  const auto cfg = FilterConfig::from_json({{"min_area_px", 20}});
  EXPECT_EQ(cfg.min_area_px, 20);
  EXPECT_DOUBLE_EQ(cfg.dedup_iou, 0.9);
  EXPECT_EQ(code_of([] { FilterConfig::from_json({{"white_ratio", 1.5}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { filter_candidates({{"x", Bitmap(3, 3)}}, kDark); }),
            ErrorCode::kDimensionMismatch);
}

TEST(FilterCandidates, IdempotentAndPreserving) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> px(0, kW - 1), py(0, kH - 1), sz(1, 30);
  for (int trial = 0; trial < 200; ++trial) {
    RgbImage img(kH, kW, Rgb{255, 255, 255});
    for (int k = 0; k < 300; ++k) img.set(px(rng), py(rng), {20, 20, 20});
    std::vector<Candidate> cs;
    for (int k = 0; k < 8; ++k) {
      const int x = px(rng), y = py(rng);
      cs.push_back({"c" + std::to_string(k), rect_mask(kH, kW, x, y, x + sz(rng), y + sz(rng))});
      if (k % 3 == 0) cs.push_back({"d" + std::to_string(k), cs.back().mask});
    }
    FilterConfig cfg;
    cfg.white_ratio = 0.98;
    const auto once = filter_candidates(cs, img, cfg);
    const auto twice = filter_candidates(once, img, cfg);
    ASSERT_EQ(once, twice) << "trial " << trial;
    ASSERT_LE(once.size(), cs.size());
    for (const auto& k : once) {
      auto it = std::find_if(cs.begin(), cs.end(), [&](const Candidate& c) { return c.id == k.id; });
      ASSERT_NE(it, cs.end());
      ASSERT_EQ(it->mask, k.mask);
    }
  }
}

TEST(OverlayMarks, Bijection) {
  const RgbImage img(80, 80);
  const std::vector<Candidate> cs = {{"a", rect_mask(80, 80, 0, 0, 20, 20)},
                                     {"b", rect_mask(80, 80, 50, 0, 80, 20)},
                                     {"c", rect_mask(80, 80, 0, 50, 30, 80)}};
  const auto m = overlay_marks(img, cs);
  EXPECT_EQ(m.id_map, (std::map<int, std::string>{{1, "a"}, {2, "b"}, {3, "c"}}));
  ASSERT_EQ(m.badges.size(), 3u);
  for (const auto& b : m.badges) {
    EXPECT_GE(b.x0, 0);
    EXPECT_GE(b.y0, 0);
    EXPECT_LE(b.x1, 80);
    EXPECT_LE(b.y1, 80);
  }
  EXPECT_NE(m.image, img);
  EXPECT_EQ(m.image.height(), img.height());
}

TEST(OverlayMarks, IdenticalAnchorsAreNudged) {
  const RgbImage img(100, 100);
  const auto mask = rect_mask(100, 100, 40, 40, 60, 60);
  std::vector<Candidate> cs;
  for (int k = 0; k < 12; ++k) cs.push_back({"m" + std::to_string(k), mask});
  const auto m = overlay_marks(img, cs);
  for (size_t i = 0; i < m.badges.size(); ++i) {
    const auto [w, h] = badge_size(static_cast<int>(i) + 1);
    EXPECT_EQ(m.badges[i].x1 - m.badges[i].x0, w);
    EXPECT_EQ(m.badges[i].y1 - m.badges[i].y0, h);
    for (size_t j = 0; j < i; ++j) {
      EXPECT_FALSE(m.badges[i].overlaps(m.badges[j])) << i << " vs " << j;
    }
  }
}

TEST(OverlayMarks, Errors) {
  EXPECT_EQ(code_of([] { overlay_marks(RgbImage(10, 10), {}); }), ErrorCode::kEmptyCandidates);
  EXPECT_EQ(code_of([] { overlay_marks(RgbImage(10, 10), {{"x", Bitmap(5, 5)}}); }),
            ErrorCode::kDimensionMismatch);
}

TEST(OverlayMarks, Deterministic) {
  const RgbImage img(64, 64, Rgb{200, 220, 240});
  const std::vector<Candidate> cs = {{"a", rect_mask(64, 64, 3, 3, 30, 30)},
                                     {"b", rect_mask(64, 64, 20, 20, 60, 60)}};
  EXPECT_EQ(overlay_marks(img, cs).image, overlay_marks(img, cs).image);
}

TEST(ParseSelection, Examples) {
  const std::map<int, std::string> id_map = {{1, "a"}, {2, "b"}, {3, "c"}};
  EXPECT_EQ(parse_selection("The answer is [1, 3]", id_map),
            (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(parse_selection("[2, 2]", id_map), (std::vector<std::string>{"b"}));
  EXPECT_EQ(parse_selection("first [1], final answer: [3,2]", id_map),
            (std::vector<std::string>{"c", "b"}));
  EXPECT_TRUE(parse_selection("none of them: []", id_map).empty());
  EXPECT_EQ(code_of([&] { parse_selection("[7]", id_map); }), ErrorCode::kUnknownMarkId);
  EXPECT_EQ(code_of([&] { parse_selection("[0]", id_map); }), ErrorCode::kUnknownMarkId);
  EXPECT_EQ(code_of([&] { parse_selection("I think mark two", id_map); }),
            ErrorCode::kNoSelectionFound);
  EXPECT_EQ(code_of([&] { parse_selection("[a, b]", id_map); }), ErrorCode::kNoSelectionFound);
}

TEST(ParseSelection, RenderRoundTrip) {
  std::map<int, std::string> id_map;
  for (int k = 1; k <= 30; ++k) id_map[k] = "id" + std::to_string(k);
  std::mt19937 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> marks;
    for (int k = 1; k <= 30; ++k) {
      if (rng() % 4 == 0) marks.push_back(k);
    }
    std::shuffle(marks.begin(), marks.end(), rng);
    std::vector<std::string> want;
    for (int k : marks) want.push_back(id_map[k]);
    EXPECT_EQ(parse_selection(render_selection(marks), id_map), want);
  }
}

TEST(RenderPrompt, Substitutes) {
  EXPECT_EQ(render_prompt("find {expression} now: {expression}", "the red bar"),
            "find the red bar now: the red bar");
  EXPECT_NE(render_prompt(kDefaultPromptTemplate, "xyz").find("\"xyz\""), std::string::npos);
}

struct GroundingFixture {
  RgbImage image{60, 90};
  std::vector<Candidate> candidates = {{"c0", rect_mask(60, 90, 0, 0, 20, 20)},
                                       {"c1", rect_mask(60, 90, 30, 0, 50, 20)},
                                       {"c2", rect_mask(60, 90, 60, 30, 90, 60)}};
  GroundingSample sample() const {
    GroundingSample s;
    s.id = "s0";
    s.image_id = "img";
    s.expression = "the two right-most regions";
    s.category = ElementCategory::kTreemap;
    return s;
  }
};

TEST(RunGrounding, GoldStubScoresOne) {
  GroundingFixture fx;
  GoldSelectorClient client({{"s0", {"c1", "c2"}}});
  const auto r = run_grounding(fx.sample(), fx.image, fx.candidates, client);
  EXPECT_FALSE(r.selection_error.has_value());
  EXPECT_EQ(r.selected_ids, (std::vector<std::string>{"c1", "c2"}));
  std::vector<Bitmap> preds;
  for (const auto& m : r.prediction.masks) preds.push_back(decode_rle(m));
  const auto metrics = eval_masks(preds, {fx.candidates[1].mask, fx.candidates[2].mask},
                                  ElementCategory::kTreemap);
  EXPECT_EQ(metrics.f1, 1.0);
  EXPECT_EQ(r.prediction.sample_id, "s0");
  EXPECT_EQ(r.prediction.format, PredictionFormat::kMask);
}

TEST(RunGrounding, ProseIsEmptyPrediction) {
  GroundingFixture fx;
  const std::map<std::string, std::string> responses = {
      {"s0", "The regions on the right side look relevant."}};
  StubClient client(responses);
  const auto r = run_grounding(fx.sample(), fx.image, fx.candidates, client);
  EXPECT_EQ(r.selection_error, ErrorCode::kNoSelectionFound);
  EXPECT_TRUE(r.prediction.masks.empty());
  EXPECT_EQ(make_metrics(0, 0, 2).f1, 0.0);
}

TEST(RunGrounding, ClientFailureNamesSample) {
  GroundingFixture fx;
  StubClient client({});
  try {
    run_grounding(fx.sample(), fx.image, fx.candidates, client);
    FAIL() << "expected ClientFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClientFailure);
    EXPECT_NE(std::string(e.what()).find("s0"), std::string::npos);
  }
}

TEST(RunGrounding, WritesMarkedImage) {
  GroundingFixture fx;
  testing::ScratchDir dir("grounding");
  GroundingOptions opts;
  opts.work_dir = dir.path();
  StubClient client({}, "[1]");
  const auto r = run_grounding(fx.sample(), fx.image, fx.candidates, client, opts);
  EXPECT_EQ(r.selected_ids, (std::vector<std::string>{"c0"}));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "s0.png"));
}

TEST(ReplayClientTest, ReadsJsonl) {
  testing::ScratchDir dir("replay");
  testing::write_text(dir.path() / "r.jsonl",
                      "{\"sample_id\": \"s0\", \"response\": \"[3]\"}\n\n"
                      "{\"sample_id\": \"s1\", \"response\": \"no idea\"}\n");
  ReplayClient client(dir.path() / "r.jsonl");
  GroundingFixture fx;
  const auto r = run_grounding(fx.sample(), fx.image, fx.candidates, client);
  EXPECT_EQ(r.selected_ids, (std::vector<std::string>{"c2"}));
  auto other = fx.sample();
  other.id = "s9";
  EXPECT_EQ(code_of([&] { run_grounding(other, fx.image, fx.candidates, client); }),
            ErrorCode::kClientFailure);
}

TEST(HttpJsonClientTest, PostsAndParses) {
  httplib::Server server;
  nlohmann::json seen;
  std::string auth;
  server.Post("/select", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"response": "marks [2]"})", "application/json");
  });
  server.Post("/raw", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("[1, 3]", "text/plain");
  });
  server.Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("CHARTFORGE_TEST_TOKEN", "secret", 1);
  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  GroundingFixture fx;
  HttpJsonClient client(base + "/select", "CHARTFORGE_TEST_TOKEN", 10);
  const auto r = run_grounding(fx.sample(), fx.image, fx.candidates, client);
  EXPECT_EQ(r.selected_ids, (std::vector<std::string>{"c1"}));
  EXPECT_EQ(auth, "Bearer secret");
  EXPECT_EQ(seen.at("sample_id"), "s0");
  EXPECT_EQ(seen.at("candidate_count"), 3);
  EXPECT_FALSE(seen.at("image_png_base64").get<std::string>().empty());

  HttpJsonClient raw(base + "/raw", "CHARTFORGE_TEST_TOKEN", 10);
  EXPECT_EQ(run_grounding(fx.sample(), fx.image, fx.candidates, raw).selected_ids,
            (std::vector<std::string>{"c0", "c2"}));
  HttpJsonClient down(base + "/down", "CHARTFORGE_TEST_TOKEN", 10);
  EXPECT_EQ(code_of([&] { run_grounding(fx.sample(), fx.image, fx.candidates, down); }),
            ErrorCode::kClientFailure);

  server.stop();
  worker.join();
}

}  // namespace
}  // namespace chartforge
