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

#include "topoloss/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topoloss/error.hpp"

namespace topoloss {
namespace {

void check_dims(int width, int height, int bit_depth) {
  if (width <= 0 || height <= 0) {
    throw ArgumentError("image dimensions must be positive, got " + std::to_string(width) +
                        "x" + std::to_string(height));
  }
  if (bit_depth != 8 && bit_depth != 16) {
    throw ArgumentError("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }
}

}  // namespace

Image::Image(int width, int height, int bit_depth)
    : width_(width), height_(height), bit_depth_(bit_depth) {
  check_dims(width, height, bit_depth);
  pixels_.assign(static_cast<std::size_t>(width) * height, 0);
}

Image::Image(int width, int height, int bit_depth, std::vector<std::uint16_t> pixels)
    : width_(width), height_(height), bit_depth_(bit_depth), pixels_(std::move(pixels)) {
  check_dims(width, height, bit_depth);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw ArgumentError("pixel count " + std::to_string(pixels_.size()) +
                        " does not match " + std::to_string(width) + "x" +
                        std::to_string(height));
  }
  const std::uint32_t limit = max_value();
  if (std::any_of(pixels_.begin(), pixels_.end(),
                  [limit](std::uint16_t v) { return v > limit; })) {
    throw ArgumentError("pixel value exceeds " + std::to_string(limit));
  }
}

Raster::Raster(int w, int h, std::vector<double> v) : width(w), height(h), values(std::move(v)) {
  if (w < 0 || h < 0 || values.size() != static_cast<std::size_t>(w) * h) {
    throw ArgumentError("raster buffer does not match its dimensions");
  }
}

Raster to_unit_raster(const Image& img) {
  Raster r(img.width(), img.height());
  const double scale = static_cast<double>(img.max_value());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) r.values[i] = px[i] / scale;
  r.max_level = img.max_value();
  return r;
}

Raster to_level_raster(const Image& img) {
  Raster r(img.width(), img.height());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) r.values[i] = px[i];
  return r;
}

Image from_level_raster(const Raster& raster, int bit_depth) {
  const double top = bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<std::uint16_t> px(raster.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double v = std::round(raster.values[i]);  // half away from zero
    px[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, top));
  }
  return Image(raster.width, raster.height, bit_depth, std::move(px));
}

Image from_unit_raster(const Raster& raster, int bit_depth) {
  const double top = bit_depth == 16 ? 65535.0 : 255.0;
  Raster scaled = raster;
  for (double& v : scaled.values) v *= top;
  return from_level_raster(scaled, bit_depth);
}

}  // namespace topoloss
