// Copyright 2026 The topoloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace topoloss {

// Single-channel integer raster. Immutable once constructed.
class Image {
 public:
  Image() = default;

  // All-zero image.
  Image(int width, int height, int bit_depth);

  // Throws ArgumentError when the dimensions, depth or any sample is invalid.
  Image(int width, int height, int bit_depth, std::vector<std::uint16_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int bit_depth() const noexcept { return bit_depth_; }
  std::uint32_t max_value() const noexcept { return (1u << bit_depth_) - 1u; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  std::span<const std::uint16_t> pixels() const noexcept { return pixels_; }
  std::uint16_t at(int row, int col) const noexcept {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int bit_depth_ = 8;
  std::vector<std::uint16_t> pixels_;
};

// Real-valued row-major raster.
//
// `max_level` marks a raster whose values sit on the lattice {k / max_level};
// it is set when the raster comes from an integer Image so that contrast
// ranking and sphere normalization can run in exact integer arithmetic.
// Zero means the values are continuous.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::uint32_t max_level = 0;

  Raster() = default;
  Raster(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}
  Raster(int w, int h, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double at(int row, int col) const noexcept {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  double& at(int row, int col) noexcept {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  bool same_shape(const Raster& other) const noexcept {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

// v / (2^bit_depth - 1), with max_level recorded.
Raster to_unit_raster(const Image& img);

// Pixel values as doubles, in level units.
Raster to_level_raster(const Image& img);

// Rounds half away from zero and clamps to [0, 2^bit_depth - 1].
Image from_level_raster(const Raster& raster, int bit_depth);

// Same as from_level_raster after scaling unit values by the level range.
Image from_unit_raster(const Raster& raster, int bit_depth);

}  // namespace topoloss
