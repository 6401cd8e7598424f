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

#ifndef CHARTFORGE_SRC_BADGE_FONT_H_
#define CHARTFORGE_SRC_BADGE_FONT_H_

#include <array>
#include <cstdint>

namespace chartforge::internal {

inline constexpr int kGlyphWidth = 3;
inline constexpr int kGlyphHeight = 5;

// Row bitmasks, top row first; bit 2 is the leftmost column.
const std::array<uint8_t, kGlyphHeight>& digit_glyph(int digit);

}  // namespace chartforge::internal

#endif  // CHARTFORGE_SRC_BADGE_FONT_H_
