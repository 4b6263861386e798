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

#include "topoloss/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "topoloss/error.hpp"

namespace topoloss {
namespace {

struct FiltrationEdge {
  double value;
  int i;  // i < j
  int j;
};

// The 1-skeleton of the Rips complex up to `radius`, in filtration order.
struct EdgeFiltration {
  std::size_t n = 0;
  std::vector<FiltrationEdge> edges;
  std::vector<int> index;  // n x n, filtration position or -1

  int at(int a, int b) const noexcept { return index[static_cast<std::size_t>(a) * n + b]; }
};

double resolve_radius(const DistanceMatrix& dist, const FiltrationSpec& spec) {
  spec.validate();
  return spec.max_radius ? *spec.max_radius : enclosing_radius(dist);
}

EdgeFiltration build_edges(const DistanceMatrix& dist, double radius) {
  EdgeFiltration f;
  f.n = dist.size();
  for (std::size_t i = 0; i < f.n; ++i) {
    for (std::size_t j = i + 1; j < f.n; ++j) {
      const double d = dist(i, j);
      if (d <= radius) f.edges.push_back({d, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(f.edges.begin(), f.edges.end(), [](const FiltrationEdge& a, const FiltrationEdge& b) {
    return std::tie(a.value, a.i, a.j) < std::tie(b.value, b.i, b.j);
  });
  f.index.assign(f.n * f.n, -1);
  for (std::size_t e = 0; e < f.edges.size(); ++e) {
    const auto& edge = f.edges[e];
    f.index[static_cast<std::size_t>(edge.i) * f.n + edge.j] = static_cast<int>(e);
    f.index[static_cast<std::size_t>(edge.j) * f.n + edge.i] = static_cast<int>(e);
  }
  return f;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

// Z/2 addition of two columns stored as strictly descending index lists.
void add_column(std::vector<int>& target, const std::vector<int>& source) {
  std::vector<int> out;
  out.reserve(target.size() + source.size());
  auto a = target.begin();
  auto b = source.begin();
  while (a != target.end() && b != source.end()) {
    if (*a > *b) {
      out.push_back(*a++);
    } else if (*b > *a) {
      out.push_back(*b++);
    } else {
      ++a;
      ++b;
    }
  }
  out.insert(out.end(), a, target.end());
  out.insert(out.end(), b, source.end());
  target.swap(out);
}

Edge as_edge(const FiltrationEdge& e) { return Edge{e.i, e.j}; }

// H0 by union-find. Returns the pairs and marks edges that merge components.
std::vector<PersistencePair> h0_union_find(const EdgeFiltration& f,
                                           std::vector<char>& negative) {
  std::vector<PersistencePair> pairs;
  negative.assign(f.edges.size(), 0);
  UnionFind uf(f.n);
  std::size_t components = f.n;
  for (std::size_t e = 0; e < f.edges.size() && components > 1; ++e) {
    const auto& edge = f.edges[e];
    if (!uf.unite(edge.i, edge.j)) continue;
    negative[e] = 1;
    --components;
    if (edge.value > 0.0) pairs.push_back({0, 0.0, edge.value, Edge{}, as_edge(edge)});
  }
  for (std::size_t c = 0; c < components; ++c) pairs.push_back({0, 0.0, kInfinity, {}, {}});
  return pairs;
}

// H0 by reducing the vertex boundary columns of the edges.
std::vector<PersistencePair> h0_reduction(const EdgeFiltration& f,
                                          std::vector<char>& negative) {
  std::vector<PersistencePair> pairs;
  negative.assign(f.edges.size(), 0);
  std::vector<int> owner(f.n, -1);
  std::vector<std::vector<int>> reduced(f.edges.size());
  for (std::size_t e = 0; e < f.edges.size(); ++e) {
    std::vector<int> col{f.edges[e].j, f.edges[e].i};
    while (!col.empty() && owner[col.front()] >= 0) add_column(col, reduced[owner[col.front()]]);
    if (col.empty()) continue;
    owner[col.front()] = static_cast<int>(e);
    negative[e] = 1;
    reduced[e] = std::move(col);
    if (f.edges[e].value > 0.0) {
      pairs.push_back({0, 0.0, f.edges[e].value, Edge{}, as_edge(f.edges[e])});
    }
  }
  for (std::size_t v = 0; v < f.n; ++v) {
    if (owner[v] < 0) pairs.push_back({0, 0.0, kInfinity, {}, {}});
  }
  return pairs;
}

struct Triangle {
  int a, b, c;  // sorted ascending
  int pivot;    // filtration index of the latest edge
  int e1, e2;   // the two other edges
};

// H1 by column reduction of triangle boundaries. Triangles are generated by
// their latest edge, so edges are visited in filtration order and each group
// of equal-valued edges yields its triangles in lexicographic vertex order.
// Stops once every positive edge has been paired.
std::vector<PersistencePair> h1_reduction(const EdgeFiltration& f,
                                          const std::vector<char>& negative) {
  std::vector<PersistencePair> pairs;
  const std::size_t m = f.edges.size();
  std::size_t unpaired = 0;
  for (std::size_t e = 0; e < m; ++e) unpaired += negative[e] ? 0 : 1;

  std::vector<int> owner(m, -1);
  std::vector<std::vector<int>> reduced;
  std::vector<char> paired(m, 0);
  std::vector<Triangle> group;

  std::size_t g0 = 0;
  while (g0 < m && unpaired > 0) {
    std::size_t g1 = g0 + 1;
    while (g1 < m && f.edges[g1].value == f.edges[g0].value) ++g1;
    group.clear();
    for (std::size_t e = g0; e < g1; ++e) {
      const auto& edge = f.edges[e];
      for (std::size_t k = 0; k < f.n; ++k) {
        const int kk = static_cast<int>(k);
        if (kk == edge.i || kk == edge.j) continue;
        const int ea = f.at(edge.i, kk);
        const int eb = f.at(edge.j, kk);
        if (ea < 0 || eb < 0 || ea >= static_cast<int>(e) || eb >= static_cast<int>(e)) continue;
        std::array<int, 3> v{edge.i, edge.j, kk};
        std::sort(v.begin(), v.end());
        group.push_back({v[0], v[1], v[2], static_cast<int>(e), std::max(ea, eb),
                         std::min(ea, eb)});
      }
    }
    std::sort(group.begin(), group.end(), [](const Triangle& x, const Triangle& y) {
      return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
    });
    for (const Triangle& t : group) {
      std::vector<int> col{t.pivot, t.e1, t.e2};
      while (!col.empty() && owner[col.front()] >= 0) add_column(col, reduced[owner[col.front()]]);
      if (col.empty()) continue;
      const int low = col.front();
      owner[low] = static_cast<int>(reduced.size());
      reduced.push_back(std::move(col));
      paired[low] = 1;
      --unpaired;
      const double birth = f.edges[low].value;
      const double death = f.edges[t.pivot].value;
      if (death > birth) {
        pairs.push_back({1, birth, death, as_edge(f.edges[low]), as_edge(f.edges[t.pivot])});
      }
      if (unpaired == 0) break;
    }
    g0 = g1;
  }
  // Cycles still alive at the truncation radius.
  for (std::size_t e = 0; e < m; ++e) {
    if (!negative[e] && !paired[e]) {
      pairs.push_back({1, f.edges[e].value, kInfinity, as_edge(f.edges[e]), {}});
    }
  }
  return pairs;
}

PersistenceDiagram finish(std::vector<PersistencePair> pairs, std::size_t n) {
  PersistenceDiagram d;
  d.pairs = std::move(pairs);
  d.point_count = n;
  canonicalize(d);
  return d;
}

}  // namespace

PointCloud::PointCloud(std::size_t dimension, std::vector<double> coords)
    : dim_(dimension), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0) {
    throw ArgumentError("coordinate buffer is not a whole number of points");
  }
  count_ = coords_.size() / dim_;
}

PointCloud::PointCloud(const std::vector<std::vector<double>>& points) {
  count_ = points.size();
  if (points.empty()) return;
  dim_ = points.front().size();
  coords_.reserve(dim_ * points.size());
  for (const auto& p : points) {
    if (p.size() != dim_) {
      throw ArgumentError("mixed point dimensions: " + std::to_string(dim_) + " and " +
                          std::to_string(p.size()));
    }
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
}

PointCloud::PointCloud(std::span<const PatchVector> points) : dim_(kPatchDim), count_(points.size()) {
  coords_.reserve(points.size() * kPatchDim);
  for (const auto& p : points) coords_.insert(coords_.end(), p.begin(), p.end());
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), d_(std::move(entries)) {
  if (d_.size() != n * n) throw ArgumentError("distance matrix must be n x n");
}

DistanceMatrix distance_matrix(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.dimension();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = cloud.point(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = cloud.point(j);
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      d[i * n + j] = d[j * n + i] = std::sqrt(s);
    }
  }
  return DistanceMatrix(n, std::move(d));
}

double enclosing_radius(const DistanceMatrix& dist) {
  double best = kInfinity;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) worst = std::max(worst, dist(i, j));
    best = std::min(best, worst);
  }
  return dist.size() == 0 ? 0.0 : best;
}

void FiltrationSpec::validate() const {
  if (max_dimension < 0 || max_dimension > 1) {
    throw ArgumentError("max_dimension must be 0 or 1, got " + std::to_string(max_dimension));
  }
  if (max_radius && !(*max_radius > 0.0)) throw ArgumentError("max_radius must be positive");
}

std::size_t PersistenceDiagram::count(int dim) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [dim](const auto& p) { return p.dim == dim; }));
}

std::size_t PersistenceDiagram::essential_count(int dim) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      pairs.begin(), pairs.end(), [dim](const auto& p) { return p.dim == dim && p.essential(); }));
}

void canonicalize(PersistenceDiagram& diagram) {
  std::stable_sort(diagram.pairs.begin(), diagram.pairs.end(),
                   [](const PersistencePair& x, const PersistencePair& y) {
                     return std::tie(x.dim, x.birth, x.death, x.birth_edge.a, x.birth_edge.b,
                                     x.death_edge.a, x.death_edge.b) <
                            std::tie(y.dim, y.birth, y.death, y.birth_edge.a, y.birth_edge.b,
                                     y.death_edge.a, y.death_edge.b);
                   });
}

PersistenceDiagram h0_diagram(const DistanceMatrix& dist, const FiltrationSpec& spec) {
  if (dist.size() == 0) return {};
  const auto f = build_edges(dist, resolve_radius(dist, spec));
  std::vector<char> negative;
  return finish(h0_union_find(f, negative), dist.size());
}

PersistenceDiagram h1_diagram(const DistanceMatrix& dist, const FiltrationSpec& spec) {
  if (dist.size() == 0) return {};
  const auto f = build_edges(dist, resolve_radius(dist, spec));
  std::vector<char> negative;
  h0_union_find(f, negative);
  return finish(h1_reduction(f, negative), dist.size());
}

PersistenceDiagram vr_diagram(const DistanceMatrix& dist, const FiltrationSpec& spec) {
  if (dist.size() == 0) throw ArgumentError("cannot compute a diagram of an empty cloud");
  const auto f = build_edges(dist, resolve_radius(dist, spec));
  std::vector<char> negative;
  auto pairs = h0_union_find(f, negative);
  if (spec.max_dimension >= 1) {
    auto h1 = h1_reduction(f, negative);
    pairs.insert(pairs.end(), h1.begin(), h1.end());
  }
  return finish(std::move(pairs), dist.size());
}

PersistenceDiagram vr_diagram(const PointCloud& cloud, const FiltrationSpec& spec) {
  if (cloud.size() == 0) throw ArgumentError("cannot compute a diagram of an empty cloud");
  return vr_diagram(distance_matrix(cloud), spec);
}

PersistenceDiagram vr_diagram_reduced(const DistanceMatrix& dist, const FiltrationSpec& spec) {
  if (dist.size() == 0) throw ArgumentError("cannot compute a diagram of an empty cloud");
  const auto f = build_edges(dist, resolve_radius(dist, spec));
  std::vector<char> negative;
  auto pairs = h0_reduction(f, negative);
  if (spec.max_dimension >= 1) {
    auto h1 = h1_reduction(f, negative);
    pairs.insert(pairs.end(), h1.begin(), h1.end());
  }
  return finish(std::move(pairs), dist.size());
}

}  // namespace topoloss
