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

#ifndef CHARTFORGE_SOM_PIPELINE_H_
#define CHARTFORGE_SOM_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/bitmap.h"
#include "chartforge/error.h"
#include "chartforge/mask_forge.h"
#include "chartforge/predictions.h"
#include "chartforge/raster.h"
#include "chartforge/target_resolver.h"

namespace chartforge {

struct FilterConfig {
  int64_t min_area_px = 10;
  double dedup_iou = 0.9;
  double composite_coverage = 0.98;
  double white_ratio = 0.95;
  int white_channel_min = 245;

  // kInvalidArgument unless ratios lie in (0, 1], min_area >= 1 and the
  // channel bound lies in [0, 255].
  void validate() const;
  static FilterConfig from_json(const nlohmann::json& j);
};

struct Candidate {
  std::string id;
  Bitmap mask;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct FilterReport {
  std::vector<Candidate> kept;
  // (candidate id, rule) for every removal: "area", "dedup", "composite", "white".
  std::vector<std::pair<std::string, std::string>> removed;
};

// Area, then duplicates (the earlier candidate wins), then composites
// (largest first, against the union of the remaining others), then
// white-dominated masks. Surviving bitmaps are untouched.
FilterReport filter_candidates_detailed(const std::vector<Candidate>& candidates,
                                        const RgbImage& image, const FilterConfig& cfg = {});
std::vector<Candidate> filter_candidates(const std::vector<Candidate>& candidates,
                                         const RgbImage& image, const FilterConfig& cfg = {});

struct BadgeStyle {
  int glyph_scale = 3;  // each font pixel becomes scale x scale
  int padding = 2;
  Rgb fill{20, 20, 20};
  Rgb text{255, 255, 255};
  bool outline_masks = true;
};

struct BadgeBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;  // exclusive
  int y1 = 0;

  bool overlaps(const BadgeBox& o) const {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
};

struct MarkedImage {
  RgbImage image;
  std::map<int, std::string> id_map;  // mark number (from 1) -> candidate id
  std::vector<BadgeBox> badges;       // badges[k] shows mark k + 1
};

// Throws kEmptyCandidates and kDimensionMismatch.
MarkedImage overlay_marks(const RgbImage& image, const std::vector<Candidate>& candidates,
                          const BadgeStyle& style = {});

// Width and height in pixels of the badge for `mark`.
std::pair<int, int> badge_size(int mark, const BadgeStyle& style = {});

// Candidate ids named by the last bracketed integer list in the response,
// first occurrence order. "[]" selects nothing. Throws kNoSelectionFound and
// kUnknownMarkId.
std::vector<std::string> parse_selection(std::string_view response,
                                         const std::map<int, std::string>& id_map);
std::string render_selection(const std::vector<int>& marks);

struct SelectionRequest {
  std::string sample_id;
  std::string expression;
  std::string prompt;
  int candidate_count = 0;
  std::filesystem::path marked_image_file;  // empty when not written
  const MarkedImage* marked = nullptr;
};

class SelectionClient {
 public:
  virtual ~SelectionClient() = default;
  virtual std::string select(const SelectionRequest& request) = 0;
};

// Fixed responses per sample id, with an optional fallback.
class StubClient : public SelectionClient {
 public:
  explicit StubClient(std::map<std::string, std::string> responses,
                      std::optional<std::string> fallback = std::nullopt);
  std::string select(const SelectionRequest& request) override;

 private:
  std::map<std::string, std::string> responses_;
  std::optional<std::string> fallback_;
};

// Answers with the marks of the gold candidate ids of each sample.
class GoldSelectorClient : public SelectionClient {
 public:
  explicit GoldSelectorClient(std::map<std::string, std::vector<std::string>> gold);
  std::string select(const SelectionRequest& request) override;

 private:
  std::map<std::string, std::vector<std::string>> gold_;
};

// Cached responses, one JSON line {"sample_id", "response"} each.
class ReplayClient : public SelectionClient {
 public:
  explicit ReplayClient(const std::filesystem::path& jsonl);
  std::string select(const SelectionRequest& request) override;

 private:
  std::map<std::string, std::string> responses_;
};

// POSTs {"sample_id", "expression", "prompt", "candidate_count",
// "image_png_base64"} to the endpoint with a bearer token read from
// `token_env`. Reads "response" from a JSON reply, or the raw body otherwise.
class HttpJsonClient : public SelectionClient {
 public:
  HttpJsonClient(std::string endpoint, std::string token_env = "CHARTFORGE_CLIENT_TOKEN",
                 int timeout_s = 120);
  std::string select(const SelectionRequest& request) override;

 private:
  std::string endpoint_;
  std::string token_env_;
  int timeout_s_;
};

inline constexpr std::string_view kDefaultPromptTemplate =
    "The image shows a chart with numbered marks on candidate regions. "
    "Select every mark that belongs to: \"{expression}\". "
    "Answer with a list of mark numbers such as [1, 3].";

std::string render_prompt(std::string_view templ, std::string_view expression);

struct GroundingOptions {
  std::string prompt_template = std::string(kDefaultPromptTemplate);
  std::filesystem::path work_dir;  // marked images are written here when set
  BadgeStyle style;
};

struct GroundingResult {
  PredictionSet prediction;  // mask format
  std::vector<std::string> selected_ids;
  std::string response;
  // Set when the response could not be used and the prediction is empty.
  std::optional<ErrorCode> selection_error;
};

// Client failures surface as kClientFailure naming the sample. Unparseable
// selections become an empty prediction with `selection_error` set.
GroundingResult run_grounding(const GroundingSample& sample, const RgbImage& image,
                              const std::vector<Candidate>& candidates,
                              SelectionClient& client, const GroundingOptions& options = {});

}  // namespace chartforge

#endif  // CHARTFORGE_SOM_PIPELINE_H_
