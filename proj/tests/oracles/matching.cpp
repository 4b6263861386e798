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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "oracles.hpp"

namespace oracle {
namespace {

// Calls visit(cost) for every partial matching, where cost is accumulated by
// `combine` from the matched and diagonal costs.
void enumerate(const std::vector<Point2>& a, const std::vector<Point2>& b,
               const std::function<double(const Point2&, const Point2&)>& pair_cost,
               const std::function<double(const Point2&)>& diagonal_cost,
               const std::function<double(double, double)>& combine,
               const std::function<void(double)>& visit) {
  std::vector<bool> used(b.size(), false);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
    if (i == a.size()) {
      double total = acc;
      for (std::size_t j = 0; j < b.size(); ++j)
        if (!used[j]) total = combine(total, diagonal_cost(b[j]));
      visit(total);
      return;
    }
    rec(i + 1, combine(acc, diagonal_cost(a[i])));
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      rec(i + 1, combine(acc, pair_cost(a[i], b[j])));
      used[j] = false;
    }
  };
  rec(0, 0.0);
}

}  // namespace

double wasserstein(const std::vector<Point2>& a, const std::vector<Point2>& b, double p) {
  double best = std::numeric_limits<double>::infinity();
  enumerate(
      a, b,
      [p](const Point2& x, const Point2& y) {
        return std::pow(std::hypot(x.birth - y.birth, x.death - y.death), p);
      },
      [p](const Point2& x) {
        // Nearest diagonal point is the midpoint ((b+d)/2, (b+d)/2).
        const double mid = 0.5 * (x.birth + x.death);
        return std::pow(std::hypot(x.birth - mid, x.death - mid), p);
      },
      [](double acc, double c) { return acc + c; }, [&](double total) { best = std::min(best, total); });
  return std::pow(best, 1.0 / p);
}

double bottleneck(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double best = std::numeric_limits<double>::infinity();
  enumerate(
      a, b,
      [](const Point2& x, const Point2& y) {
        return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
      },
      [](const Point2& x) { return 0.5 * (x.death - x.birth); },
      [](double acc, double c) { return std::max(acc, c); },
      [&](double total) { best = std::min(best, total); });
  return best;
}

}  // namespace oracle
