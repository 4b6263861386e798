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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace fixtures {

using topoloss::Image;
using topoloss::Raster;
using topoloss::SplitMix64;

Image natural_like(int width, int height, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  const double gx = rng.uniform01() * 60 - 30;
  const double gy = rng.uniform01() * 60 - 30;
  const double base = 100 + rng.uniform01() * 50;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      v[y * width + x] = base + gx * x / width + gy * y / height;

  const int shapes = 6 + static_cast<int>(rng.uniform_below(6));
  for (int s = 0; s < shapes; ++s) {
    const double cx = rng.uniform01() * width;
    const double cy = rng.uniform01() * height;
    const double rx = (0.05 + 0.2 * rng.uniform01()) * width;
    const double ry = (0.05 + 0.2 * rng.uniform01()) * height;
    const double level = rng.uniform01() * 120 - 60;
    const bool ellipse = rng.uniform_below(2) == 0;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = (x - cx) / rx;
        const double dy = (y - cy) / ry;
        const bool inside = ellipse ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (inside) v[y * width + x] += level;
      }
    }
  }
  const double fx = 0.05 + 0.4 * rng.uniform01();
  const double fy = 0.05 + 0.4 * rng.uniform01();
  const double amp = 4 + 8 * rng.uniform01();
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) v[y * width + x] += amp * std::sin(fx * x) * std::cos(fy * y);

  std::vector<std::uint16_t> px(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    px[i] = static_cast<std::uint16_t>(std::clamp(std::round(v[i]), 30.0, 225.0));
  }
  return Image(width, height, 8, std::move(px));
}

Image add_noise(const Image& img, double sigma, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const double top = static_cast<double>(img.max_value());
  std::vector<std::uint16_t> px(img.pixels().begin(), img.pixels().end());
  for (auto& p : px) {
    const double v = p + sigma * rng.normal();
    p = static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, top));
  }
  return Image(img.width(), img.height(), img.bit_depth(), std::move(px));
}

double scene(double x, double y) {
  const double a = std::sin(0.21 * x + 0.3) * std::cos(0.17 * y - 0.2);
  const double b = std::exp(-((x - 40) * (x - 40) + (y - 50) * (y - 50)) / 300.0);
  const double c = std::exp(-((x - 85) * (x - 85) + (y - 70) * (y - 70)) / 150.0);
  return 0.5 + 0.2 * a + 0.2 * b - 0.15 * c + 0.05 * std::sin(0.05 * x * y / 8.0);
}

Raster sample_scene(int width, int height, const topoloss::RigidTransform& t) {
  Raster r(width, height);
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double cs = std::cos(t.theta);
  const double sn = std::sin(t.theta);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      r.at(y, x) = scene(cs * dx - sn * dy + cx + t.tx, sn * dx + cs * dy + cy + t.ty);
    }
  }
  return r;
}

oracle::Points random_cloud(SplitMix64& rng, std::size_t n, std::size_t dim) {
  oracle::Points pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (auto& c : p) c = rng.uniform01();
  return pts;
}

std::vector<oracle::Pair> to_pairs(const topoloss::PersistenceDiagram& d) {
  std::vector<oracle::Pair> out;
  for (const auto& p : d.pairs) out.push_back({p.dim, p.birth, p.death});
  std::sort(out.begin(), out.end(), [](const oracle::Pair& a, const oracle::Pair& b) {
    return std::tie(a.dim, a.birth, a.death) < std::tie(b.dim, b.birth, b.death);
  });
  return out;
}

std::vector<oracle::Point2> finite_points(const topoloss::PersistenceDiagram& d, int dim) {
  std::vector<oracle::Point2> out;
  for (const auto& p : d.pairs)
    if (p.dim == dim && !p.essential()) out.push_back({p.birth, p.death});
  return out;
}

topoloss::PersistenceDiagram make_diagram(const std::vector<oracle::Point2>& points, int dim) {
  topoloss::PersistenceDiagram d;
  for (const auto& p : points) {
    topoloss::PersistencePair pair;
    pair.dim = dim;
    pair.birth = p.birth;
    pair.death = p.death;
    d.pairs.push_back(pair);
  }
  return d;
}

}  // namespace fixtures
