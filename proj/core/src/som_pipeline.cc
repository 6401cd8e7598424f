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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <regex>

#include "badge_font.h"
#include "chartforge/eval_core.h"
#include "chartforge/rle.h"

namespace chartforge {
namespace {

constexpr std::array<Rgb, 8> kOutlinePalette{{
    {230, 25, 75},
    {60, 180, 75},
    {0, 130, 200},
    {245, 130, 48},
    {145, 30, 180},
    {70, 240, 240},
    {240, 50, 230},
    {128, 128, 0},
}};

bool in_unit_interval(double v) { return v > 0.0 && v <= 1.0; }

void fill_box(RgbImage& img, const BadgeBox& b, Rgb c) {
  for (int y = std::max(0, b.y0); y < std::min(img.height(), b.y1); ++y) {
    for (int x = std::max(0, b.x0); x < std::min(img.width(), b.x1); ++x) img.set(x, y, c);
  }
}

void draw_number(RgbImage& img, int mark, const BadgeBox& box, const BadgeStyle& style) {
  fill_box(img, box, style.fill);
  const std::string digits = std::to_string(mark);
  int x = box.x0 + style.padding;
  const int y = box.y0 + style.padding;
  const int s = style.glyph_scale;
  for (char ch : digits) {
    const auto& glyph = internal::digit_glyph(ch - '0');
    for (int gy = 0; gy < internal::kGlyphHeight; ++gy) {
      for (int gx = 0; gx < internal::kGlyphWidth; ++gx) {
        if ((glyph[static_cast<size_t>(gy)] >> (internal::kGlyphWidth - 1 - gx) & 1) == 0) {
          continue;
        }
        fill_box(img, {x + gx * s, y + gy * s, x + (gx + 1) * s, y + (gy + 1) * s},
                 style.text);
      }
    }
    x += (internal::kGlyphWidth + 1) * s;
  }
}

BadgeBox clamp_box(int cx, int cy, int w, int h, int width, int height) {
  const int x0 = std::clamp(cx - w / 2, 0, std::max(0, width - w));
  const int y0 = std::clamp(cy - h / 2, 0, std::max(0, height - h));
  return {x0, y0, x0 + w, y0 + h};
}

bool collides(const BadgeBox& b, const std::vector<BadgeBox>& placed) {
  return std::any_of(placed.begin(), placed.end(),
                     [&b](const BadgeBox& o) { return b.overlaps(o); });
}

BadgeBox place_badge(const Point& anchor, int w, int h, int width, int height,
                     const std::vector<BadgeBox>& placed) {
  const int cx = static_cast<int>(std::floor(anchor.x));
  const int cy = static_cast<int>(std::floor(anchor.y));
  const BadgeBox first = clamp_box(cx, cy, w, h, width, height);
  if (!collides(first, placed)) return first;
  // Walk outward ring by ring in badge-sized steps.
  const int max_ring = std::max(width / std::max(1, w), height / std::max(1, h)) + 1;
  for (int ring = 1; ring <= max_ring; ++ring) {
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        const BadgeBox b =
            clamp_box(cx + dx * (w + 1), cy + dy * (h + 1), w, h, width, height);
        if (!collides(b, placed)) return b;
      }
    }
  }
  return first;
}

}  // namespace

void FilterConfig::validate() const {
  if (min_area_px < 1) fail(ErrorCode::kInvalidArgument, "min_area_px must be >= 1");
  if (!in_unit_interval(dedup_iou) || !in_unit_interval(composite_coverage) ||
      !in_unit_interval(white_ratio)) {
    fail(ErrorCode::kInvalidArgument, "filter ratios must lie in (0, 1]");
  }
  if (white_channel_min < 0 || white_channel_min > 255) {
    fail(ErrorCode::kInvalidArgument, "white_channel_min must lie in [0, 255]");
  }
}

FilterConfig FilterConfig::from_json(const nlohmann::json& j) {
  FilterConfig c;
  try {
    c.min_area_px = j.value("min_area_px", c.min_area_px);
    c.dedup_iou = j.value("dedup_iou", c.dedup_iou);
    c.composite_coverage = j.value("composite_coverage", c.composite_coverage);
    c.white_ratio = j.value("white_ratio", c.white_ratio);
    c.white_channel_min = j.value("white_channel_min", c.white_channel_min);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaError, std::string("bad filter config: ") + e.what());
  }
  c.validate();
  return c;
}

FilterReport filter_candidates_detailed(const std::vector<Candidate>& candidates,
                                        const RgbImage& image, const FilterConfig& cfg) {
  cfg.validate();
  for (const auto& c : candidates) {
    if (c.mask.height() != image.height() || c.mask.width() != image.width()) {
      fail(ErrorCode::kDimensionMismatch, "candidate " + c.id + " differs from image size");
    }
  }
  FilterReport report;
  const size_t n = candidates.size();
  std::vector<bool> alive(n, true);
  std::vector<int64_t> area(n);
  for (size_t i = 0; i < n; ++i) {
    area[i] = candidates[i].mask.count();
    if (area[i] < cfg.min_area_px) {
      alive[i] = false;
      report.removed.emplace_back(candidates[i].id, "area");
    }
  }

  std::vector<size_t> kept;
  for (size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](size_t k) {
      return mask_iou(candidates[i].mask, candidates[k].mask) > cfg.dedup_iou;
    });
    if (dup) {
      alive[i] = false;
      report.removed.emplace_back(candidates[i].id, "dedup");
    } else {
      kept.push_back(i);
    }
  }

  // cover[p] counts surviving candidates on pixel p.
  std::vector<uint32_t> cover(static_cast<size_t>(image.height()) * image.width(), 0);
  for (size_t i : kept) {
    const auto px = candidates[i].mask.pixels();
    for (size_t p = 0; p < px.size(); ++p) cover[p] += px[p];
  }
  std::vector<size_t> by_area = kept;
  std::stable_sort(by_area.begin(), by_area.end(),
                   [&](size_t a, size_t b) { return area[a] > area[b]; });
  for (size_t i : by_area) {
    const auto px = candidates[i].mask.pixels();
    int64_t covered = 0;
    for (size_t p = 0; p < px.size(); ++p) {
      if (px[p] != 0 && cover[p] >= 2) ++covered;
    }
    const double ratio = static_cast<double>(covered) / static_cast<double>(area[i]);
    if (ratio >= cfg.composite_coverage) {
      alive[i] = false;
      report.removed.emplace_back(candidates[i].id, "composite");
      for (size_t p = 0; p < px.size(); ++p) cover[p] -= px[p];
    }
  }

  const auto rgb = image.pixels();
  for (size_t i : kept) {
    if (!alive[i]) continue;
    const auto px = candidates[i].mask.pixels();
    int64_t white = 0;
    for (size_t p = 0; p < px.size(); ++p) {
      if (px[p] == 0) continue;
      const uint8_t* c = &rgb[p * 3];
      if (c[0] >= cfg.white_channel_min && c[1] >= cfg.white_channel_min &&
          c[2] >= cfg.white_channel_min) {
        ++white;
      }
    }
    if (static_cast<double>(white) / static_cast<double>(area[i]) > cfg.white_ratio) {
      alive[i] = false;
      report.removed.emplace_back(candidates[i].id, "white");
    }
  }

  for (size_t i = 0; i < n; ++i) {
    if (alive[i]) report.kept.push_back(candidates[i]);
  }
  return report;
}

std::vector<Candidate> filter_candidates(const std::vector<Candidate>& candidates,
                                         const RgbImage& image, const FilterConfig& cfg) {
  return filter_candidates_detailed(candidates, image, cfg).kept;
}

std::pair<int, int> badge_size(int mark, const BadgeStyle& style) {
  const int digits = static_cast<int>(std::to_string(mark).size());
  const int s = style.glyph_scale;
  const int w = 2 * style.padding + digits * internal::kGlyphWidth * s + (digits - 1) * s;
  const int h = 2 * style.padding + internal::kGlyphHeight * s;
  return {w, h};
}

MarkedImage overlay_marks(const RgbImage& image, const std::vector<Candidate>& candidates,
                          const BadgeStyle& style) {
  if (candidates.empty()) fail(ErrorCode::kEmptyCandidates, "no candidates to mark");
  if (style.glyph_scale < 1 || style.padding < 0) {
    fail(ErrorCode::kInvalidArgument, "bad badge style");
  }
  MarkedImage out;
  out.image = image;
  for (size_t k = 0; k < candidates.size(); ++k) {
    const auto& mask = candidates[k].mask;
    if (mask.height() != image.height() || mask.width() != image.width()) {
      fail(ErrorCode::kDimensionMismatch,
           "candidate " + candidates[k].id + " differs from image size");
    }
    if (!style.outline_masks) continue;
    const Bitmap contour = inner_contour(mask);
    const Rgb color = kOutlinePalette[k % kOutlinePalette.size()];
    for (int y = 0; y < contour.height(); ++y) {
      for (int x = 0; x < contour.width(); ++x) {
        if (contour.at(x, y)) out.image.set(x, y, color);
      }
    }
  }
  for (size_t k = 0; k < candidates.size(); ++k) {
    const int mark = static_cast<int>(k) + 1;
    const auto [w, h] = badge_size(mark, style);
    const Point anchor = representative_point(candidates[k].mask);
    const BadgeBox box =
        place_badge(anchor, w, h, image.width(), image.height(), out.badges);
    out.badges.push_back(box);
    out.id_map[mark] = candidates[k].id;
    draw_number(out.image, mark, box, style);
  }
  return out;
}

std::vector<std::string> parse_selection(std::string_view response,
                                         const std::map<int, std::string>& id_map) {
  static const std::regex kList(R"(\[\s*(?:[-+]?\d+\s*(?:,\s*[-+]?\d+\s*)*)?\])");
  const std::string text(response);
  std::smatch last;
  bool found = false;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kList);
       it != std::sregex_iterator(); ++it) {
    last = *it;
    found = true;
  }
  if (!found) fail(ErrorCode::kNoSelectionFound, "no bracketed mark list in response");
  static const std::regex kNumber(R"([-+]?\d+)");
  const std::string list = last.str();
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(list.begin(), list.end(), kNumber);
       it != std::sregex_iterator(); ++it) {
    const std::string token = it->str();
    const char* begin = token.data() + (token[0] == '+' ? 1 : 0);
    int mark = 0;
    const auto [ptr, ec] = std::from_chars(begin, token.data() + token.size(), mark);
    auto hit = ec == std::errc() ? id_map.find(mark) : id_map.end();
    if (hit == id_map.end()) fail(ErrorCode::kUnknownMarkId, "mark " + token + " was not drawn");
    if (std::find(out.begin(), out.end(), hit->second) == out.end()) out.push_back(hit->second);
  }
  return out;
}

std::string render_selection(const std::vector<int>& marks) {
  std::string s = "[";
  for (size_t i = 0; i < marks.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(marks[i]);
  }
  return s + "]";
}

std::string render_prompt(std::string_view templ, std::string_view expression) {
  std::string out(templ);
  const std::string key = "{expression}";
  for (size_t pos = out.find(key); pos != std::string::npos;
       pos = out.find(key, pos + expression.size())) {
    out.replace(pos, key.size(), expression);
  }
  return out;
}

GroundingResult run_grounding(const GroundingSample& sample, const RgbImage& image,
                              const std::vector<Candidate>& candidates,
                              SelectionClient& client, const GroundingOptions& options) {
  GroundingResult result;
  result.prediction.sample_id = sample.id;
  result.prediction.format = PredictionFormat::kMask;
  if (candidates.empty()) {
    result.selection_error = ErrorCode::kEmptyCandidates;
    return result;
  }
  const MarkedImage marked = overlay_marks(image, candidates, options.style);
  SelectionRequest request;
  request.sample_id = sample.id;
  request.expression = sample.expression;
  request.prompt = render_prompt(options.prompt_template, sample.expression);
  request.candidate_count = static_cast<int>(candidates.size());
  request.marked = &marked;
  if (!options.work_dir.empty()) {
    std::filesystem::create_directories(options.work_dir);
    request.marked_image_file = options.work_dir / (sample.id + ".png");
    write_png(marked.image, request.marked_image_file);
  }
  try {
    result.response = client.select(request);
  } catch (const std::exception& e) {
    fail(ErrorCode::kClientFailure, "sample " + sample.id + ": " + e.what());
  }
  try {
    result.selected_ids = parse_selection(result.response, marked.id_map);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoSelectionFound && e.code() != ErrorCode::kUnknownMarkId) {
      throw;
    }
    result.selection_error = e.code();
    return result;
  }
  for (const auto& id : result.selected_ids) {
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&id](const Candidate& c) { return c.id == id; });
    result.prediction.masks.push_back(encode_rle(it->mask));
  }
  return result;
}

}  // namespace chartforge
