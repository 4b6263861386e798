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

#include "topoloss/patch_space.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "topoloss/error.hpp"
#include "topoloss/parallel.hpp"
#include "topoloss/rng.hpp"

namespace topoloss {
namespace {

// Four-connected neighbour pairs of a row-major 3x3 grid.
constexpr std::array<std::array<int, 2>, 12> kAdjacentPairs{{
    {0, 1}, {1, 2}, {3, 4}, {4, 5}, {6, 7}, {7, 8},
    {0, 3}, {3, 6}, {1, 4}, {4, 7}, {2, 5}, {5, 8},
}};

std::array<std::int64_t, kPatchDim> lattice_levels(const Patch& p) {
  std::array<std::int64_t, kPatchDim> levels{};
  for (int i = 0; i < kPatchDim; ++i) {
    levels[i] = std::llround(p.values[i] * static_cast<double>(p.max_level));
  }
  return levels;
}

std::size_t fraction_count(double fraction, std::size_t n) {
  if (n == 0) return 0;
  // The epsilon keeps products like 0.2 * 10 from rounding up to 3.
  const double raw = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

void check_fraction(double f, const char* name) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw ArgumentError(std::string(name) + " must lie in (0, 1], got " + std::to_string(f));
  }
}

}  // namespace

void PatchSpaceConfig::validate() const {
  check_fraction(contrast_fraction, "contrast fraction t");
  check_fraction(density_fraction, "density fraction");
  if (k <= 0) throw ArgumentError("k must be positive");
  if (n <= 0) throw ArgumentError("n must be positive");
  if (stride <= 0) throw ArgumentError("stride must be positive");
}

std::vector<Patch> extract_patches(const Raster& raster, int stride) {
  if (stride <= 0) throw ArgumentError("stride must be positive");
  if (raster.width < kPatchSide || raster.height < kPatchSide) {
    throw ArgumentError("image must be at least 3x3 for patch extraction, got " +
                        std::to_string(raster.width) + "x" + std::to_string(raster.height));
  }
  std::vector<Patch> patches;
  for (int r = 0; r + kPatchSide <= raster.height; r += stride) {
    for (int c = 0; c + kPatchSide <= raster.width; c += stride) {
      Patch p;
      p.origin = {r, c};
      p.max_level = raster.max_level;
      for (int i = 0; i < kPatchSide; ++i) {
        for (int j = 0; j < kPatchSide; ++j) p.values[i * kPatchSide + j] = raster.at(r + i, c + j);
      }
      patches.push_back(p);
    }
  }
  return patches;
}

std::vector<Patch> extract_patches(const Image& img, int stride) {
  return extract_patches(to_unit_raster(img), stride);
}

double d_norm(const Patch& patch) {
  if (patch.max_level > 0) {
    const auto levels = lattice_levels(patch);
    std::int64_t sum = 0;
    for (const auto& [i, j] : kAdjacentPairs) sum += std::llabs(levels[i] - levels[j]);
    return static_cast<double>(sum) / static_cast<double>(patch.max_level);
  }
  double sum = 0.0;
  for (const auto& [i, j] : kAdjacentPairs) sum += std::abs(patch.values[i] - patch.values[j]);
  return sum;
}

std::vector<Patch> select_top_contrast(std::span<const Patch> patches, double t) {
  check_fraction(t, "contrast fraction t");
  if (patches.empty()) return {};
  std::vector<double> norms(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) norms[i] = d_norm(patches[i]);
  std::vector<std::size_t> order(patches.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (norms[a] != norms[b]) return norms[a] > norms[b];
    return patches[a].origin < patches[b].origin;
  });
  order.resize(fraction_count(t, patches.size()));
  std::vector<Patch> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(patches[i]);
  return out;
}

NormalizedPatches normalize_to_sphere(std::span<const Patch> patches) {
  NormalizedPatches out;
  for (const Patch& p : patches) {
    PatchVector v{};
    if (p.max_level > 0) {
      // Scaled centring 9 L_i - sum L is exact in integers, so patches that
      // differ by an intensity offset map to bit-identical vectors.
      const auto levels = lattice_levels(p);
      const std::int64_t sum = std::accumulate(levels.begin(), levels.end(), std::int64_t{0});
      std::array<std::int64_t, kPatchDim> centred{};
      std::int64_t norm2 = 0;
      for (int i = 0; i < kPatchDim; ++i) {
        centred[i] = kPatchDim * levels[i] - sum;
        norm2 += centred[i] * centred[i];
      }
      if (norm2 == 0) {
        ++out.dropped_degenerate;
        continue;
      }
      const double norm = std::sqrt(static_cast<double>(norm2));
      for (int i = 0; i < kPatchDim; ++i) v[i] = static_cast<double>(centred[i]) / norm;
    } else {
      double mean = 0.0;
      for (double x : p.values) mean += x;
      mean /= kPatchDim;
      double norm2 = 0.0;
      for (int i = 0; i < kPatchDim; ++i) {
        v[i] = p.values[i] - mean;
        norm2 += v[i] * v[i];
      }
      const double norm = std::sqrt(norm2);
      if (norm < 1e-12) {
        ++out.dropped_degenerate;
        continue;
      }
      for (double& x : v) x /= norm;
    }
    out.points.push_back(v);
    out.origins.push_back(p.origin);
  }
  return out;
}

std::vector<double> k_nearest_distances(std::span<const PatchVector> points, int k,
                                        int threads) {
  const std::size_t n = points.size();
  if (k <= 0) throw ArgumentError("k must be positive");
  if (n <= static_cast<std::size_t>(k)) {
    throw ArgumentError("k-density needs more than k=" + std::to_string(k) + " points, got " +
                        std::to_string(n));
  }
  // Coordinates stored column-wise so each row of squared distances is one
  // vectorizable sweep, accumulated in coordinate order.
  std::vector<double> columns(n * kPatchDim);
  for (std::size_t j = 0; j < n; ++j)
    for (int c = 0; c < kPatchDim; ++c) columns[c * n + j] = points[j][c];

  std::vector<double> score(n);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> row(n, 0.0);
    for (int c = 0; c < kPatchDim; ++c) {
      const double xc = points[i][c];
      const double* col = columns.data() + c * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = xc - col[j];
        row[j] += d * d;
      }
    }
    // Max-heap of the k smallest squared distances to other points.
    std::vector<double> heap;
    heap.reserve(static_cast<std::size_t>(k));
    std::size_t j = 0;
    for (; j < n && heap.size() < static_cast<std::size_t>(k); ++j) {
      if (j == i) continue;
      heap.push_back(row[j]);
      std::push_heap(heap.begin(), heap.end());
    }
    for (; j < n; ++j) {
      if (row[j] >= heap.front() || j == i) continue;
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = row[j];
      std::push_heap(heap.begin(), heap.end());
    }
    score[i] = std::sqrt(heap.front());
  });
  return score;
}

std::vector<std::size_t> k_density_select(std::span<const PatchVector> points, int k,
                                          double density_fraction, int threads) {
  check_fraction(density_fraction, "density fraction");
  const auto score = k_nearest_distances(points, k, threads);
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  order.resize(fraction_count(density_fraction, points.size()));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<PatchVector> k_density_filter(std::span<const PatchVector> points, int k,
                                          double density_fraction, int threads) {
  std::vector<PatchVector> out;
  for (auto i : k_density_select(points, k, density_fraction, threads)) out.push_back(points[i]);
  return out;
}

PatchCloud sample_cloud(std::span<const PatchVector> points, int n, std::uint64_t seed) {
  if (n <= 0) throw ArgumentError("n must be positive");
  PatchCloud cloud;
  cloud.config.n = n;
  cloud.config.seed = seed;
  for (auto i : sample_indices(points.size(), static_cast<std::size_t>(n), seed)) {
    cloud.points.push_back(points[i]);
  }
  return cloud;
}

PatchCloud build_patch_cloud(const Raster& unit_raster, const PatchSpaceConfig& cfg,
                             int threads) {
  cfg.validate();
  const auto patches = extract_patches(unit_raster, cfg.stride);
  const auto top = select_top_contrast(patches, cfg.contrast_fraction);
  auto normalized = normalize_to_sphere(top);
  const std::size_t available = normalized.points.size();
  if (available == 0) throw DegenerateInputError("no contrast patches");
  if (available <= static_cast<std::size_t>(cfg.k)) {
    throw DegenerateInputError("too few contrast patches: " + std::to_string(available) +
                               " survive, k-density needs more than k=" +
                               std::to_string(cfg.k));
  }
  const auto dense =
      k_density_select(normalized.points, cfg.k, cfg.density_fraction, threads);
  const auto picked = sample_indices(dense.size(), static_cast<std::size_t>(cfg.n), cfg.seed);

  PatchCloud cloud;
  cloud.config = cfg;
  cloud.dropped_degenerate = normalized.dropped_degenerate;
  cloud.points.reserve(picked.size());
  cloud.origins.reserve(picked.size());
  for (auto i : picked) {
    cloud.points.push_back(normalized.points[dense[i]]);
    cloud.origins.push_back(normalized.origins[dense[i]]);
  }
  return cloud;
}

PatchCloud build_patch_cloud(const Image& img, const PatchSpaceConfig& cfg, int threads) {
  return build_patch_cloud(to_unit_raster(img), cfg, threads);
}

}  // namespace topoloss
