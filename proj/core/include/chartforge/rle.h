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

#ifndef CHARTFORGE_RLE_H_
#define CHARTFORGE_RLE_H_

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/bitmap.h"

namespace chartforge {

// Uncompressed COCO-convention run-length mask: runs alternate
// background/foreground over column-major pixel order, first run background
// (possibly zero).
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<uint32_t> counts;

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

RleMask encode_rle(const Bitmap& mask);

// Throws kLengthMismatch when sum(counts) != height * width.
Bitmap decode_rle(const RleMask& rle);

// Foreground pixel count without decoding.
int64_t rle_area(const RleMask& rle);

// {"size": [H, W], "counts": [...]}
nlohmann::json rle_to_json(const RleMask& rle);
RleMask rle_from_json(const nlohmann::json& j);

}  // namespace chartforge

#endif  // CHARTFORGE_RLE_H_
