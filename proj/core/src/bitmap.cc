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

#include "chartforge/bitmap.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "chartforge/error.h"

namespace chartforge {
namespace {

void require_same_shape(const Bitmap& a, const Bitmap& b) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::kDimensionMismatch,
         std::to_string(a.height()) + "x" + std::to_string(a.width()) +
             " vs " + std::to_string(b.height()) + "x" +
             std::to_string(b.width()));
  }
}

// Sliding-window "all ones" test along one axis: out[i] = 1 iff every input
// in [i - r, i + r] is 1, with out-of-range entries treated as 0.
void erode_line(const uint8_t* in, uint8_t* out, int n, int stride, int r) {
  // Prefix count of zeros lets each window be answered in O(1).
  std::vector<int> zeros(n + 1, 0);
  for (int i = 0; i < n; ++i) zeros[i + 1] = zeros[i] + (in[i * stride] == 0);
  for (int i = 0; i < n; ++i) {
    const int lo = i - r;
    const int hi = i + r;
    if (lo < 0 || hi >= n) {
      out[i * stride] = 0;
      continue;
    }
    out[i * stride] = (zeros[hi + 1] - zeros[lo]) == 0 ? 1 : 0;
  }
}

}  // namespace

Bitmap::Bitmap(int height, int width) : height_(height), width_(width) {
  if (height < 0 || width < 0) {
    fail(ErrorCode::kInvalidArgument, "negative bitmap dimensions");
  }
  pixels_.assign(static_cast<size_t>(height) * width, 0);
}

int64_t Bitmap::count() const {
  return std::accumulate(pixels_.begin(), pixels_.end(), int64_t{0});
}

bool Bitmap::any() const {
  return std::any_of(pixels_.begin(), pixels_.end(),
                     [](uint8_t v) { return v != 0; });
}

void Bitmap::fill_rect(int x0, int y0, int x1, int y1, bool value) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, width_);
  y1 = std::min(y1, height_);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) set(x, y, value);
  }
}

Bitmap& Bitmap::operator|=(const Bitmap& other) {
  require_same_shape(*this, other);
  for (size_t i = 0; i < pixels_.size(); ++i) pixels_[i] |= other.pixels_[i];
  return *this;
}

Bitmap& Bitmap::operator&=(const Bitmap& other) {
  require_same_shape(*this, other);
  for (size_t i = 0; i < pixels_.size(); ++i) pixels_[i] &= other.pixels_[i];
  return *this;
}

int64_t intersection_count(const Bitmap& a, const Bitmap& b) {
  require_same_shape(a, b);
  auto pa = a.pixels();
  auto pb = b.pixels();
  int64_t n = 0;
  for (size_t i = 0; i < pa.size(); ++i) n += (pa[i] & pb[i]);
  return n;
}

int64_t union_count(const Bitmap& a, const Bitmap& b) {
  require_same_shape(a, b);
  auto pa = a.pixels();
  auto pb = b.pixels();
  int64_t n = 0;
  for (size_t i = 0; i < pa.size(); ++i) n += (pa[i] | pb[i]);
  return n;
}

Bitmap difference(const Bitmap& a, const Bitmap& b) {
  require_same_shape(a, b);
  Bitmap out(a.height(), a.width());
  auto pa = a.pixels();
  auto pb = b.pixels();
  auto po = out.pixels();
  for (size_t i = 0; i < pa.size(); ++i) po[i] = pa[i] & (pb[i] ^ 1);
  return out;
}

Bitmap erode_square(const Bitmap& mask, int radius) {
  if (radius < 0) fail(ErrorCode::kInvalidArgument, "negative erosion radius");
  if (radius == 0 || mask.size() == 0) return mask;
  const int h = mask.height();
  const int w = mask.width();
  // The square element is separable: erode rows, then columns.
  Bitmap rows(h, w);
  for (int y = 0; y < h; ++y) {
    erode_line(mask.pixels().data() + static_cast<size_t>(y) * w,
               rows.pixels().data() + static_cast<size_t>(y) * w, w, 1, radius);
  }
  Bitmap out(h, w);
  for (int x = 0; x < w; ++x) {
    erode_line(rows.pixels().data() + x, out.pixels().data() + x, h, w, radius);
  }
  return out;
}

Bitmap inner_contour(const Bitmap& mask) {
  Bitmap out(mask.height(), mask.width());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x + 1 == mask.width() ||
                        y + 1 == mask.height() || !mask.at(x - 1, y) ||
                        !mask.at(x + 1, y) || !mask.at(x, y - 1) ||
                        !mask.at(x, y + 1);
      if (edge) out.set(x, y);
    }
  }
  return out;
}

}  // namespace chartforge
