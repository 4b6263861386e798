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
#include <span>
#include <utility>
#include <vector>

#include "topoloss/persistence.hpp"

namespace topoloss {

enum class EssentialMode {
  kExclude,  // infinite-death pairs are dropped before matching
  kStrict,   // counts must agree per dimension; matched by sorted birth
};

// Indices refer to positions in the `pairs` vectors of the two diagrams.
struct DiagramMatching {
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  std::vector<std::size_t> to_diagonal_1;
  std::vector<std::size_t> to_diagonal_2;
  double cost = 0.0;
  double p = 2.0;
};

// Euclidean distance from (birth, death) to the diagonal: persistence / sqrt(2).
double diagonal_distance_l2(const PersistencePair& x) noexcept;

// p-Wasserstein distance with the L2 ground metric, solved exactly as an
// assignment on the diagonal-augmented bipartite graph. Each homology
// dimension in `dims` is matched separately and the p-th powers are summed.
DiagramMatching wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                            double p, std::span<const int> dims,
                            EssentialMode mode = EssentialMode::kExclude);

// (sum of matched |x - y|_2^p + sum of diagonal (pers / sqrt 2)^p)^(1/p),
// evaluated from the matching's index lists.
double matching_cost(const DiagramMatching& m, const PersistenceDiagram& d1,
                     const PersistenceDiagram& d2);

// Bottleneck distance with the L-infinity ground metric.
double bottleneck(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                  std::span<const int> dims, EssentialMode mode = EssentialMode::kExclude);

}  // namespace topoloss
