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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "topoloss/patch_space.hpp"

namespace topoloss {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Points of a common dimension, stored flat.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dimension, std::vector<double> coords);
  // Throws ArgumentError on mixed dimensions.
  explicit PointCloud(const std::vector<std::vector<double>>& points);
  explicit PointCloud(std::span<const PatchVector> points);

  std::size_t size() const noexcept { return dim_ == 0 ? count_ : coords_.size() / dim_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

 private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> coords_;
};

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

DistanceMatrix distance_matrix(const PointCloud& cloud);

// min_i max_j d(i, j): above this radius the Rips complex is a cone.
double enclosing_radius(const DistanceMatrix& dist);

struct FiltrationSpec {
  int max_dimension = 1;
  std::optional<double> max_radius;  // nullopt: enclosing radius

  void validate() const;
};

// Vertex pair of the edge whose length realizes a birth or death value.
struct Edge {
  int a = -1;
  int b = -1;

  bool valid() const noexcept { return a >= 0; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;
  Edge birth_edge;  // invalid for H0 (births at 0)
  Edge death_edge;  // invalid for essential classes

  bool essential() const noexcept { return death == kInfinity; }
  double persistence() const noexcept { return death - birth; }
};

struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  std::size_t point_count = 0;

  std::size_t count(int dim) const noexcept;
  std::size_t essential_count(int dim) const noexcept;
};

// Sorts by (dim, birth, death), then by witness edges.
void canonicalize(PersistenceDiagram& diagram);

// Kruskal over edges ordered by (length, i, j); each merge edge of positive
// length is a death. Edges longer than the filtration radius are ignored.
PersistenceDiagram h0_diagram(const DistanceMatrix& dist, const FiltrationSpec& spec = {});

// Z/2 column reduction of the triangle boundary matrix of the Rips complex.
PersistenceDiagram h1_diagram(const DistanceMatrix& dist, const FiltrationSpec& spec = {});

// H0 via union-find plus H1 when spec.max_dimension == 1. Throws
// ArgumentError on an empty cloud.
PersistenceDiagram vr_diagram(const PointCloud& cloud, const FiltrationSpec& spec = {});
PersistenceDiagram vr_diagram(const DistanceMatrix& dist, const FiltrationSpec& spec = {});

// Same diagram, with H0 also obtained by reducing the edge boundary matrix
// instead of union-find. Used to cross-check the fast path.
PersistenceDiagram vr_diagram_reduced(const DistanceMatrix& dist,
                                      const FiltrationSpec& spec = {});

}  // namespace topoloss
