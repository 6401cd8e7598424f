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

#ifndef CHARTFORGE_BITMAP_H_
#define CHARTFORGE_BITMAP_H_

#include <cstdint>
#include <span>
#include <vector>

namespace chartforge {

// Binary H x W foreground mask stored row-major, one byte (0 or 1) per pixel.
// Pixel (x, y) covers the unit square [x, x+1) x [y, y+1), origin top-left.
class Bitmap {
 public:
  Bitmap() = default;
  Bitmap(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  int64_t size() const { return static_cast<int64_t>(height_) * width_; }

  bool at(int x, int y) const {
    return pixels_[static_cast<size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value = true) {
    pixels_[static_cast<size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const uint8_t> pixels() const { return pixels_; }
  std::span<uint8_t> pixels() { return pixels_; }

  int64_t count() const;
  bool any() const;
  bool same_shape(const Bitmap& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  // Fills the rectangle [x0, x1) x [y0, y1), clipped to the bitmap.
  void fill_rect(int x0, int y0, int x1, int y1, bool value = true);

  Bitmap& operator|=(const Bitmap& other);
  Bitmap& operator&=(const Bitmap& other);

  friend Bitmap operator|(Bitmap a, const Bitmap& b) { return a |= b; }
  friend Bitmap operator&(Bitmap a, const Bitmap& b) { return a &= b; }
  friend bool operator==(const Bitmap&, const Bitmap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<uint8_t> pixels_;
};

int64_t intersection_count(const Bitmap& a, const Bitmap& b);
int64_t union_count(const Bitmap& a, const Bitmap& b);

// a AND NOT b.
Bitmap difference(const Bitmap& a, const Bitmap& b);

// Binary erosion by a (2r+1) x (2r+1) square. Pixels outside the image count
// as background, so foreground touching the border erodes.
Bitmap erode_square(const Bitmap& mask, int radius);

// Foreground pixels whose 4-neighbourhood contains background (or the image
// border). Used for drawing outlines.
Bitmap inner_contour(const Bitmap& mask);

}  // namespace chartforge

#endif  // CHARTFORGE_BITMAP_H_
