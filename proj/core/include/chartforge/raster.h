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

#ifndef CHARTFORGE_RASTER_H_
#define CHARTFORGE_RASTER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace chartforge {

using Rgb = std::array<uint8_t, 3>;

// 8-bit RGB raster, row-major, origin top-left.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int height, int width, Rgb fill = {255, 255, 255});
  RgbImage(int height, int width, std::vector<uint8_t> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return height_ == 0 || width_ == 0; }

  Rgb at(int x, int y) const {
    const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
    pixels_[i] = c[0];
    pixels_[i + 1] = c[1];
    pixels_[i + 2] = c[2];
  }
  // Alpha-blends c over the pixel; alpha in [0, 1].
  void blend(int x, int y, Rgb c, double alpha);

  std::span<const uint8_t> pixels() const { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<uint8_t> pixels_;
};

// Lossless PNG I/O. Encoding is deterministic: fixed zlib level, no
// timestamp or text chunks.
std::vector<uint8_t> encode_png(const RgbImage& image);
void write_png(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_png(const std::filesystem::path& path);

}  // namespace chartforge

#endif  // CHARTFORGE_RASTER_H_
