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

#include "topoloss/diagram_distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "topoloss/assignment.hpp"
#include "topoloss/error.hpp"

namespace topoloss {
namespace {

struct DimSplit {
  std::vector<std::size_t> finite;
  std::vector<std::size_t> essential;
};

DimSplit split(const PersistenceDiagram& d, int dim) {
  DimSplit s;
  for (std::size_t i = 0; i < d.pairs.size(); ++i) {
    if (d.pairs[i].dim != dim) continue;
    (d.pairs[i].essential() ? s.essential : s.finite).push_back(i);
  }
  return s;
}

std::vector<int> unique_dims(std::span<const int> dims) {
  std::set<int> s(dims.begin(), dims.end());
  return {s.begin(), s.end()};
}

double l2(const PersistencePair& x, const PersistencePair& y) noexcept {
  const double db = x.birth - y.birth;
  const double dd = x.death - y.death;
  return std::sqrt(db * db + dd * dd);
}

double linf(const PersistencePair& x, const PersistencePair& y) noexcept {
  return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
}

// Essential classes of equal count, paired by ascending birth (optimal on a
// line for any p >= 1).
std::vector<std::pair<std::size_t, std::size_t>> pair_essentials(
    const PersistenceDiagram& d1, const PersistenceDiagram& d2, DimSplit& a, DimSplit& b,
    int dim) {
  if (a.essential.size() != b.essential.size()) {
    throw MismatchError("essential class count differs in dimension " + std::to_string(dim) +
                        ": " + std::to_string(a.essential.size()) + " vs " +
                        std::to_string(b.essential.size()));
  }
  auto by_birth = [](const PersistenceDiagram& d) {
    return [&d](std::size_t x, std::size_t y) {
      return d.pairs[x].birth < d.pairs[y].birth || (d.pairs[x].birth == d.pairs[y].birth && x < y);
    };
  };
  std::sort(a.essential.begin(), a.essential.end(), by_birth(d1));
  std::sort(b.essential.begin(), b.essential.end(), by_birth(d2));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < a.essential.size(); ++i) out.emplace_back(a.essential[i], b.essential[i]);
  return out;
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ArgumentError("Wasserstein order p must be a finite real >= 1");
  }
}

// Perfect matching test on the diagonal-augmented graph at threshold r.
bool feasible(const std::vector<PersistencePair>& x, const std::vector<PersistencePair>& y,
              double r) {
  const std::size_t m = x.size();
  const std::size_t n = y.size();
  const std::size_t size = m + n;
  // Rows: x points then diagonal copies of y. Columns: y points then diagonal copies of x.
  auto allowed = [&](std::size_t row, std::size_t col) {
    if (row < m && col < n) return linf(x[row], y[col]) <= r;
    if (row < m) return x[row].persistence() / 2.0 <= r;
    if (col < n) return y[col].persistence() / 2.0 <= r;
    return true;
  };
  std::vector<std::size_t> col_owner(size, size);
  std::vector<char> seen(size);
  auto augment = [&](auto&& self, std::size_t row) -> bool {
    for (std::size_t col = 0; col < size; ++col) {
      if (seen[col] || !allowed(row, col)) continue;
      seen[col] = 1;
      if (col_owner[col] == size || self(self, col_owner[col])) {
        col_owner[col] = row;
        return true;
      }
    }
    return false;
  };
  for (std::size_t row = 0; row < size; ++row) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(augment, row)) return false;
  }
  return true;
}

double bottleneck_finite(const std::vector<PersistencePair>& x,
                         const std::vector<PersistencePair>& y) {
  std::vector<double> candidates{0.0};
  for (const auto& a : x) candidates.push_back(a.persistence() / 2.0);
  for (const auto& b : y) candidates.push_back(b.persistence() / 2.0);
  for (const auto& a : x) {
    for (const auto& b : y) candidates.push_back(linf(a, b));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;  // everything to the diagonal is feasible
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(x, y, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

}  // namespace

double diagonal_distance_l2(const PersistencePair& x) noexcept {
  return x.persistence() * (0.5 * std::numbers::sqrt2);
}

DiagramMatching wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                            double p, std::span<const int> dims, EssentialMode mode) {
  check_p(p);
  DiagramMatching result;
  result.p = p;
  for (int dim : unique_dims(dims)) {
    DimSplit a = split(d1, dim);
    DimSplit b = split(d2, dim);
    if (mode == EssentialMode::kStrict) {
      for (auto pr : pair_essentials(d1, d2, a, b, dim)) result.matched.push_back(pr);
    }
    const std::size_t m = a.finite.size();
    const std::size_t n = b.finite.size();
    const std::size_t size = m + n;
    if (size == 0) continue;
    std::vector<double> cost(size * size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        double c = 0.0;
        if (i < m && j < n) {
          c = std::pow(l2(d1.pairs[a.finite[i]], d2.pairs[b.finite[j]]), p);
        } else if (i < m) {
          c = std::pow(diagonal_distance_l2(d1.pairs[a.finite[i]]), p);
        } else if (j < n) {
          c = std::pow(diagonal_distance_l2(d2.pairs[b.finite[j]]), p);
        }
        cost[i * size + j] = c;
      }
    }
    const Assignment assignment = solve_assignment(cost, size);
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = assignment.row_to_col[i];
      if (i < m && j < n) {
        result.matched.emplace_back(a.finite[i], b.finite[j]);
      } else if (i < m) {
        result.to_diagonal_1.push_back(a.finite[i]);
      } else if (j < n) {
        result.to_diagonal_2.push_back(b.finite[j]);
      }
    }
  }
  result.cost = matching_cost(result, d1, d2);
  return result;
}

double matching_cost(const DiagramMatching& m, const PersistenceDiagram& d1,
                     const PersistenceDiagram& d2) {
  check_p(m.p);
  std::vector<double> terms;
  terms.reserve(m.matched.size() + m.to_diagonal_1.size() + m.to_diagonal_2.size());
  for (const auto& [i, j] : m.matched) {
    const auto& x = d1.pairs.at(i);
    const auto& y = d2.pairs.at(j);
    const double dist = x.essential() && y.essential() ? std::abs(x.birth - y.birth) : l2(x, y);
    terms.push_back(std::pow(dist, m.p));
  }
  for (auto i : m.to_diagonal_1) terms.push_back(std::pow(diagonal_distance_l2(d1.pairs.at(i)), m.p));
  for (auto j : m.to_diagonal_2) terms.push_back(std::pow(diagonal_distance_l2(d2.pairs.at(j)), m.p));
  // Summing in sorted order makes the value independent of argument order.
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return std::pow(total, 1.0 / m.p);
}

double bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                  std::span<const int> dims, EssentialMode mode) {
  double worst = 0.0;
  for (int dim : unique_dims(dims)) {
    DimSplit a = split(d1, dim);
    DimSplit b = split(d2, dim);
    if (mode == EssentialMode::kStrict) {
      for (auto [i, j] : pair_essentials(d1, d2, a, b, dim)) {
        worst = std::max(worst, std::abs(d1.pairs[i].birth - d2.pairs[j].birth));
      }
    }
    std::vector<PersistencePair> x, y;
    for (auto i : a.finite) x.push_back(d1.pairs[i]);
    for (auto j : b.finite) y.push_back(d2.pairs[j]);
    worst = std::max(worst, bottleneck_finite(x, y));
  }
  return worst;
}

}  // namespace topoloss
