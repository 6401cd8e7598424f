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

#include "chartforge/rle.h"

#include <string>

#include "chartforge/error.h"

namespace chartforge {

RleMask encode_rle(const Bitmap& mask) {
  if (mask.height() <= 0 || mask.width() <= 0) {
    fail(ErrorCode::kInvalidArgument, "RLE requires positive dimensions");
  }
  RleMask rle{mask.height(), mask.width(), {}};
  uint8_t current = 0;
  uint32_t run = 0;
  for (int x = 0; x < mask.width(); ++x) {
    for (int y = 0; y < mask.height(); ++y) {
      const uint8_t v = mask.at(x, y) ? 1 : 0;
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

Bitmap decode_rle(const RleMask& rle) {
  if (rle.height <= 0 || rle.width <= 0) {
    fail(ErrorCode::kInvalidArgument, "RLE requires positive dimensions");
  }
  const int64_t total = static_cast<int64_t>(rle.height) * rle.width;
  int64_t sum = 0;
  for (uint32_t c : rle.counts) sum += c;
  if (sum != total) {
    fail(ErrorCode::kLengthMismatch, "RLE counts sum to " + std::to_string(sum) +
                                         ", expected " + std::to_string(total));
  }
  Bitmap mask(rle.height, rle.width);
  int64_t pos = 0;
  bool fg = false;
  for (uint32_t c : rle.counts) {
    if (fg) {
      for (int64_t i = pos; i < pos + c; ++i) {
        mask.set(static_cast<int>(i / rle.height),
                 static_cast<int>(i % rle.height));
      }
    }
    pos += c;
    fg = !fg;
  }
  return mask;
}

int64_t rle_area(const RleMask& rle) {
  int64_t area = 0;
  for (size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

nlohmann::json rle_to_json(const RleMask& rle) {
  return {{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

RleMask rle_from_json(const nlohmann::json& j) {
  try {
    RleMask rle;
    const auto& size = j.at("size");
    if (!size.is_array() || size.size() != 2) {
      fail(ErrorCode::kSchemaError, "RLE size must be [H, W]");
    }
    rle.height = size[0].get<int>();
    rle.width = size[1].get<int>();
    rle.counts = j.at("counts").get<std::vector<uint32_t>>();
    return rle;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kSchemaError, std::string("bad RLE mask: ") + e.what());
  }
}

}  // namespace chartforge
