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

#include <cmath>
#include <vector>

#include "oracles.hpp"

namespace oracle {

double ssim(const std::vector<double>& a, const std::vector<double>& b, int width, int height,
            double range, int window, double sigma) {
  const int r = window / 2;
  std::vector<double> w(static_cast<std::size_t>(window) * window);
  double total = 0.0;
  for (int y = 0; y < window; ++y) {
    for (int x = 0; x < window; ++x) {
      const double v = std::exp(-((x - r) * (x - r) + (y - r) * (y - r)) / (2.0 * sigma * sigma));
      w[y * window + x] = v;
      total += v;
    }
  }
  for (double& v : w) v /= total;

  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  double sum = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + window <= height; ++y0) {
    for (int x0 = 0; x0 + window <= width; ++x0) {
      double ma = 0, mb = 0;
      for (int y = 0; y < window; ++y)
        for (int x = 0; x < window; ++x) {
          const double k = w[y * window + x];
          ma += k * a[(y0 + y) * width + x0 + x];
          mb += k * b[(y0 + y) * width + x0 + x];
        }
      double vaa = 0, vbb = 0, vab = 0;
      for (int y = 0; y < window; ++y)
        for (int x = 0; x < window; ++x) {
          const double k = w[y * window + x];
          const double da = a[(y0 + y) * width + x0 + x] - ma;
          const double db = b[(y0 + y) * width + x0 + x] - mb;
          vaa += k * da * da;
          vbb += k * db * db;
          vab += k * da * db;
        }
      sum += ((2 * ma * mb + c1) * (2 * vab + c2)) / ((ma * ma + mb * mb + c1) * (vaa + vbb + c2));
      ++count;
    }
  }
  return sum / count;
}

}  // namespace oracle
