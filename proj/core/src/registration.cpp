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

#include "topoloss/registration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "topoloss/error.hpp"

namespace topoloss {
namespace {

struct Centre {
  double x;
  double y;
};

Centre centre_of(const Raster& r) { return {(r.width - 1) / 2.0, (r.height - 1) / 2.0}; }

double bilinear_clamped(const Raster& img, double x, double y) noexcept {
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = std::min(static_cast<int>(x), img.width - 1);
  const int y0 = std::min(static_cast<int>(y), img.height - 1);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = img.at(y0, x0) * (1.0 - fx) + img.at(y0, x1) * fx;
  const double bottom = img.at(y1, x0) * (1.0 - fx) + img.at(y1, x1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

// NCC restricted to fixed pixels whose transformed position lands inside the
// moving image. Returns -1 (worst) when the overlap falls below a quarter.
double masked_ncc(const Raster& moving, const Raster& fixed, const RigidTransform& t) {
  const Centre c = centre_of(fixed);
  const double cs = std::cos(t.theta);
  const double sn = std::sin(t.theta);
  const double xmax = moving.width - 1;
  const double ymax = moving.height - 1;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  std::size_t count = 0;
  for (int y = 0; y < fixed.height; ++y) {
    for (int x = 0; x < fixed.width; ++x) {
      const double dx = x - c.x;
      const double dy = y - c.y;
      const double mx = cs * dx - sn * dy + c.x + t.tx;
      const double my = sn * dx + cs * dy + c.y + t.ty;
      if (mx < 0.0 || my < 0.0 || mx > xmax || my > ymax) continue;
      const double a = fixed.at(y, x);
      const double b = bilinear_clamped(moving, mx, my);
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
      ++count;
    }
  }
  if (count * 4 < fixed.size()) return -1.0;
  const double n = static_cast<double>(count);
  const double va = saa - sa * sa / n;
  const double vb = sbb - sb * sb / n;
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return (sab - sa * sb / n) / std::sqrt(va * vb);
}

Raster downsample(const Raster& r) {
  Raster out(r.width / 2, r.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.at(y, x) = 0.25 * (r.at(2 * y, 2 * x) + r.at(2 * y, 2 * x + 1) +
                             r.at(2 * y + 1, 2 * x) + r.at(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

Raster gaussian_blur(const Raster& r, double sigma) {
  if (sigma <= 0.0) return r;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += kernel[i + radius];
  }
  for (double& k : kernel) k /= total;
  Raster tmp(r.width, r.height);
  Raster out(r.width, r.height);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += kernel[i + radius] * r.at(y, std::clamp(x + i, 0, r.width - 1));
      tmp.at(y, x) = s;
    }
  }
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += kernel[i + radius] * tmp.at(std::clamp(y + i, 0, r.height - 1), x);
      out.at(y, x) = s;
    }
  }
  return out;
}

RigidTransform unscale(const std::array<double, 3>& q, double radius) {
  return {q[0], q[1], q[2] / radius};
}

}  // namespace

Raster resample_rigid(const Raster& moving, const RigidTransform& t) {
  Raster out(moving.width, moving.height);
  const Centre c = centre_of(moving);
  const double cs = std::cos(t.theta);
  const double sn = std::sin(t.theta);
  for (int y = 0; y < moving.height; ++y) {
    for (int x = 0; x < moving.width; ++x) {
      const double dx = x - c.x;
      const double dy = y - c.y;
      out.at(y, x) = bilinear_clamped(moving, cs * dx - sn * dy + c.x + t.tx,
                                      sn * dx + cs * dy + c.y + t.ty);
    }
  }
  return out;
}

double normalized_cross_correlation(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) throw ArgumentError("NCC needs equally shaped rasters");
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a.values[i];
    sb += b.values[i];
  }
  const double ma = sa / n;
  const double mb = sb / n;
  double va = 0, vb = 0, cov = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.values[i] - ma;
    const double db = b.values[i] - mb;
    va += da * da;
    vb += db * db;
    cov += da * db;
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

RegistrationResult register_rigid(const Raster& moving, const Raster& fixed,
                                  const RegistrationOptions& options) {
  if (!moving.same_shape(fixed)) throw ArgumentError("registration needs equally shaped images");
  if (moving.width < 4 || moving.height < 4) throw ArgumentError("image too small to register");

  std::vector<Raster> pyr_moving{gaussian_blur(moving, options.smoothing_sigma)};
  std::vector<Raster> pyr_fixed{gaussian_blur(fixed, options.smoothing_sigma)};
  for (int l = 1; l < options.levels; ++l) {
    if (pyr_fixed.back().width < 32 || pyr_fixed.back().height < 32) break;
    pyr_moving.push_back(downsample(pyr_moving.back()));
    pyr_fixed.push_back(downsample(pyr_fixed.back()));
  }

  RegistrationResult result;
  std::array<double, 3> q{0.0, 0.0, 0.0};  // tx, ty at current level; theta * radius
  double theta = 0.0;
  for (int l = static_cast<int>(pyr_fixed.size()) - 1; l >= 0; --l) {
    const Raster& mv = pyr_moving[l];
    const Raster& fx = pyr_fixed[l];
    const double radius = 0.5 * std::hypot(fx.width, fx.height);
    q[2] = theta * radius;
    auto cost = [&](const std::array<double, 3>& s) { return -masked_ncc(mv, fx, unscale(s, radius)); };

    double step = l == static_cast<int>(pyr_fixed.size()) - 1 ? options.initial_step
                                                            : 0.5 * options.initial_step;
    double current = cost(q);
    for (int it = 0; it < options.max_iterations && step >= options.min_step; ++it) {
      ++result.iterations;
      std::array<double, 3> g{};
      for (int k = 0; k < 3; ++k) {
        auto hi = q;
        auto lo = q;
        hi[k] += options.gradient_delta;
        lo[k] -= options.gradient_delta;
        g[k] = (cost(hi) - cost(lo)) / (2.0 * options.gradient_delta);
      }
      const double gnorm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
      if (gnorm == 0.0) break;
      auto trial = q;
      for (int k = 0; k < 3; ++k) trial[k] -= step * g[k] / gnorm;
      const double c = cost(trial);
      if (c < current) {
        q = trial;
        current = c;
      } else {
        step *= 0.5;
      }
    }
    theta = q[2] / radius;
    if (l > 0) {
      q[0] *= 2.0;
      q[1] *= 2.0;
    }
  }

  const RigidTransform found{q[0], q[1], theta};
  result.initial_ncc = masked_ncc(pyr_moving[0], pyr_fixed[0], RigidTransform{});
  result.ncc = masked_ncc(pyr_moving[0], pyr_fixed[0], found);
  if (!(result.ncc >= result.initial_ncc)) {
    result.warning = true;
    result.transform = RigidTransform{};
    result.ncc = result.initial_ncc;
  } else {
    result.transform = found;
  }
  result.resampled = resample_rigid(moving, result.transform);
  return result;
}

}  // namespace topoloss
