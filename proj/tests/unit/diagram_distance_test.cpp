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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "topoloss/assignment.hpp"
#include "topoloss/diagram_distance.hpp"
#include "topoloss/error.hpp"
#include "topoloss/rng.hpp"

namespace {

using namespace topoloss;
using fixtures::make_diagram;

const std::vector<int> kDim0{0};

std::vector<oracle::Point2> random_points(SplitMix64& rng, std::size_t max_points) {
  std::vector<oracle::Point2> out(rng.uniform_below(max_points + 1));
  for (auto& p : out) {
    p.birth = rng.uniform01();
    p.death = p.birth + 0.01 + rng.uniform01();
  }
  return out;
}

void expect_partition(const DiagramMatching& m, std::size_t n1, std::size_t n2) {
  std::multiset<std::size_t> a(m.to_diagonal_1.begin(), m.to_diagonal_1.end());
  std::multiset<std::size_t> b(m.to_diagonal_2.begin(), m.to_diagonal_2.end());
  for (const auto& [i, j] : m.matched) {
    a.insert(i);
    b.insert(j);
  }
  EXPECT_EQ(a.size(), n1);
  EXPECT_EQ(b.size(), n2);
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), n1);
  EXPECT_EQ(std::set<std::size_t>(b.begin(), b.end()).size(), n2);
}

TEST(Assignment, SmallKnownProblem) {
  const std::vector<double> c{4, 1, 3, 2, 0, 5, 3, 2, 2};
  const Assignment a = solve_assignment(c, 3);
  EXPECT_EQ(a.cost, 5.0);
  EXPECT_EQ(a.row_to_col, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(Assignment, MatchesPermutationBruteForce) {
  SplitMix64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.uniform_below(6);
    std::vector<double> c(n * n);
    for (auto& v : c) v = rng.uniform01();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    double best = INFINITY;
    do {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += c[i * n + perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(solve_assignment(c, n).cost, best, 1e-12);
  }
}

TEST(Wasserstein, IdenticalDiagramsCostZero) {
  const auto d = make_diagram({{0, 1}, {0, 2}, {0.5, 0.7}});
  const auto m = wasserstein(d, d, 2.0, kDim0);
  EXPECT_EQ(m.cost, 0.0);
  EXPECT_EQ(m.matched.size(), 3u);
  for (const auto& [i, j] : m.matched) EXPECT_EQ(i, j);
}

TEST(Wasserstein, SinglePointToDiagonal) {
  const auto m = wasserstein(make_diagram({{0, 2}}), make_diagram({}), 1.0, kDim0);
  EXPECT_EQ(m.cost, std::numbers::sqrt2);
  EXPECT_EQ(m.to_diagonal_1, (std::vector<std::size_t>{0}));
}

TEST(Wasserstein, DirectMatchBeatsDoubleDiagonal) {
  const auto m = wasserstein(make_diagram({{0, 3}}), make_diagram({{0, 1}}), 1.0, kDim0);
  EXPECT_EQ(m.cost, 2.0);
  ASSERT_EQ(m.matched.size(), 1u);
}

TEST(Wasserstein, EqualsBruteForceEnumeration) {
  SplitMix64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_points(rng, 6);
    const auto b = random_points(rng, 6);
    const double p = t % 2 == 0 ? 1.0 : 2.0;
    const auto m = wasserstein(make_diagram(a), make_diagram(b), p, kDim0);
    EXPECT_NEAR(m.cost, oracle::wasserstein(a, b, p), 1e-9);
    expect_partition(m, a.size(), b.size());
    EXPECT_NEAR(matching_cost(m, make_diagram(a), make_diagram(b)), m.cost, 1e-9);
  }
}

TEST(Wasserstein, NonIntegerExponent) {
  SplitMix64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_points(rng, 5);
    const auto b = random_points(rng, 5);
    EXPECT_NEAR(wasserstein(make_diagram(a), make_diagram(b), 1.5, kDim0).cost, oracle::wasserstein(a, b, 1.5),
                1e-9);
  }
}

TEST(Wasserstein, MetricAxioms) {
  SplitMix64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto a = make_diagram(random_points(rng, 6));
    const auto b = make_diagram(random_points(rng, 6));
    const auto c = make_diagram(random_points(rng, 6));
    for (double p : {1.0, 2.0}) {
      const double ab = wasserstein(a, b, p, kDim0).cost;
      EXPECT_GE(ab, 0.0);
      EXPECT_EQ(ab, wasserstein(b, a, p, kDim0).cost);
      EXPECT_LE(wasserstein(a, c, p, kDim0).cost, ab + wasserstein(b, c, p, kDim0).cost + 1e-9);
      if (!a.pairs.empty() || !b.pairs.empty()) {
        const bool equal = fixtures::to_pairs(a) == fixtures::to_pairs(b);
        EXPECT_EQ(ab == 0.0, equal);
      }
    }
  }
}

TEST(Wasserstein, SinglePointPerturbationBound) {
  SplitMix64 rng(5);
  for (int t = 0; t < 50; ++t) {
    auto pts = random_points(rng, 6);
    if (pts.empty()) continue;
    const auto other = make_diagram(random_points(rng, 6));
    const double before = wasserstein(make_diagram(pts), other, 2.0, kDim0).cost;
    const double delta = 0.05 * rng.uniform01();
    const double angle = 2 * std::numbers::pi * rng.uniform01();
    auto& q = pts[rng.uniform_below(pts.size())];
    q.birth += delta * std::cos(angle);
    q.death += delta * std::sin(angle);
    if (q.death <= q.birth) continue;
    EXPECT_LE(std::abs(wasserstein(make_diagram(pts), other, 2.0, kDim0).cost - before), delta + 1e-12);
  }
}

TEST(Wasserstein, DimensionsAreMatchedSeparately) {
  auto a = make_diagram({{0, 1}});
  auto b = make_diagram({{0.2, 0.9}}, 1);
  // Across dimensions nothing may be matched: each goes to the diagonal.
  const std::vector<int> both{0, 1};
  const auto m = wasserstein(a, b, 2.0, both);
  EXPECT_TRUE(m.matched.empty());
  EXPECT_NEAR(m.cost, std::sqrt(0.5 + 0.245), 1e-12);
  EXPECT_EQ(wasserstein(a, b, 2.0, kDim0).cost, std::sqrt(0.5));
}

TEST(Wasserstein, EssentialModes) {
  auto a = make_diagram({{0, 1}, {0, INFINITY}});
  auto b = make_diagram({{0, 1}});
  EXPECT_EQ(wasserstein(a, b, 2.0, kDim0).cost, 0.0);
  EXPECT_THROW(wasserstein(a, b, 2.0, kDim0, EssentialMode::kStrict), MismatchError);
  auto c = make_diagram({{0, 1}, {0.5, INFINITY}});
  EXPECT_EQ(wasserstein(a, c, 1.0, kDim0, EssentialMode::kStrict).cost, 0.5);
  EXPECT_THROW(bottleneck(a, b, kDim0, EssentialMode::kStrict), MismatchError);
}

TEST(Wasserstein, InvalidExponent) {
  EXPECT_THROW(wasserstein(make_diagram({}), make_diagram({}), 0.5, kDim0), ArgumentError);
}

TEST(Bottleneck, Examples) {
  const auto a = make_diagram({{0, 2}});
  EXPECT_EQ(bottleneck(a, a, kDim0), 0.0);
  EXPECT_NEAR(bottleneck(a, make_diagram({{0.1, 2.1}}), kDim0), 0.1, 1e-12);
  EXPECT_EQ(bottleneck(a, make_diagram({}), kDim0), 1.0);
}

TEST(Bottleneck, EqualsBruteForceAndIsSymmetric) {
  SplitMix64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_points(rng, 6);
    const auto b = random_points(rng, 6);
    const double v = bottleneck(make_diagram(a), make_diagram(b), kDim0);
    EXPECT_EQ(v, oracle::bottleneck(a, b));
    EXPECT_EQ(v, bottleneck(make_diagram(b), make_diagram(a), kDim0));
  }
}

TEST(Diagonal, HalfPersistenceTimesSqrtTwo) {
  PersistencePair p;
  p.birth = 1;
  p.death = 3;
  EXPECT_EQ(diagonal_distance_l2(p), std::numbers::sqrt2);
}

}  // namespace
