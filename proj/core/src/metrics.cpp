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

#include "topoloss/metrics.hpp"

#include <cmath>
#include <vector>

#include "topoloss/error.hpp"

namespace topoloss {
namespace {

void check_comparable(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw ArgumentError("image dimensions differ: " + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                        "x" + std::to_string(b.height()));
  }
  if (a.bit_depth() != b.bit_depth()) throw ArgumentError("image bit depths differ");
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> w(size);
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    w[i] = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable 'valid' filtering: output is (w - k + 1) x (h - k + 1).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& kernel) {
  const int k = static_cast<int>(kernel.size());
  const int ow = w - k + 1;
  const int oh = h - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += kernel[i] * src[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += kernel[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double Psnr::decibels() const {
  if (infinite_) throw ArgumentError("PSNR is infinite (identical images)");
  return db_;
}

Psnr psnr(const Image& reference, const Image& test) {
  check_comparable(reference, test);
  const auto a = reference.pixels();
  const auto b = test.pixels();
  // Exact integer sum of squared level differences.
  unsigned long long sse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long long d = static_cast<long long>(a[i]) - b[i];
    sse += static_cast<unsigned long long>(d * d);
  }
  if (sse == 0) return Psnr::infinite();
  const double mse = static_cast<double>(sse) / static_cast<double>(a.size());
  const double peak = reference.max_value();
  return Psnr::finite(10.0 * std::log10(peak * peak / mse));
}

double ssim(const Image& reference, const Image& test, const SsimOptions& options) {
  check_comparable(reference, test);
  const int win = options.window;
  if (reference.width() < win || reference.height() < win) {
    throw ArgumentError("SSIM needs images of at least " + std::to_string(win) + "x" +
                        std::to_string(win));
  }
  const int w = reference.width();
  const int h = reference.height();
  const double scale = reference.max_value();
  const std::size_t n = reference.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = reference.pixels()[i] / scale;
    y[i] = test.pixels()[i] / scale;
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto kernel = gaussian_kernel(win, options.sigma);
  const auto mx = filter_valid(x, w, h, kernel);
  const auto my = filter_valid(y, w, h, kernel);
  const auto sxx = filter_valid(xx, w, h, kernel);
  const auto syy = filter_valid(yy, w, h, kernel);
  const auto sxy = filter_valid(xy, w, h, kernel);

  // Dynamic range is 1 on unit-normalized values.
  const double c1 = options.k1 * options.k1;
  const double c2 = options.k2 * options.k2;
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double var_x = sxx[i] - mx[i] * mx[i];
    const double var_y = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
    const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (var_x + var_y + c2);
    total += num / den;
  }
  return total / static_cast<double>(mx.size());
}

QualityReport quality(const Image& reference, const Image& test) {
  return QualityReport{psnr(reference, test), ssim(reference, test)};
}

}  // namespace topoloss
