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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topoloss/image.hpp"

namespace topoloss {

inline constexpr int kPatchSide = 3;
inline constexpr int kPatchDim = kPatchSide * kPatchSide;

using PatchVector = std::array<double, kPatchDim>;

struct PatchOrigin {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const PatchOrigin&, const PatchOrigin&) = default;
};

// A 3x3 patch, row-major. `max_level` is inherited from the source raster
// (see Raster::max_level); 0 means continuous intensities.
struct Patch {
  PatchVector values{};
  PatchOrigin origin;
  std::uint32_t max_level = 0;
};

struct PatchSpaceConfig {
  double contrast_fraction = 0.2;  // t
  double density_fraction = 0.5;
  int k = 30;
  int n = 300;
  int stride = 1;
  std::uint64_t seed = 0;

  // Throws ArgumentError on out-of-range fields.
  void validate() const;
};

struct NormalizedPatches {
  std::vector<PatchVector> points;
  std::vector<PatchOrigin> origins;
  std::size_t dropped_degenerate = 0;
};

// The sampled, normalized high-contrast patch set of one image.
struct PatchCloud {
  std::vector<PatchVector> points;
  std::vector<PatchOrigin> origins;  // parallel to points; empty for raw input
  PatchSpaceConfig config;
  std::size_t dropped_degenerate = 0;

  std::size_t size() const noexcept { return points.size(); }
};

// One patch per (r, c) with r, c multiples of `stride` and the 3x3 window in
// bounds, in row-major origin order.
std::vector<Patch> extract_patches(const Raster& unit_raster, int stride);
std::vector<Patch> extract_patches(const Image& img, int stride);

// Sum of |p_i - p_j| over the 12 four-connected pairs of the 3x3 grid.
double d_norm(const Patch& patch);

// The ceil(t * |patches|) patches with largest D-norm, in descending D-norm
// order; equal D-norms keep the smaller origin first.
std::vector<Patch> select_top_contrast(std::span<const Patch> patches, double t);

// Subtracts the coordinate mean and divides by the Euclidean norm. Patches
// whose centred norm is below 1e-12 (or exactly zero on the integer lattice)
// are dropped and counted.
NormalizedPatches normalize_to_sphere(std::span<const Patch> patches);

// Distance from every point to its k-th nearest other point.
std::vector<double> k_nearest_distances(std::span<const PatchVector> points, int k,
                                        int threads = 1);

// Indices, ascending, of the ceil(fraction * |points|) points with smallest
// k-NN distance; equal distances keep the earlier input first.
std::vector<std::size_t> k_density_select(std::span<const PatchVector> points, int k,
                                          double density_fraction, int threads = 1);

// Filtered points in input order. Throws ArgumentError when |points| <= k.
std::vector<PatchVector> k_density_filter(std::span<const PatchVector> points, int k,
                                          double density_fraction, int threads = 1);

// Uniform sample without replacement of min(n, |points|) points, order given
// by sample_indices(|points|, n, seed).
PatchCloud sample_cloud(std::span<const PatchVector> points, int n, std::uint64_t seed);

// extract -> top-t by D-norm -> sphere-normalize -> k-density -> sample.
// Throws DegenerateInputError when at most k contrast patches survive.
PatchCloud build_patch_cloud(const Raster& unit_raster, const PatchSpaceConfig& cfg,
                             int threads = 1);
PatchCloud build_patch_cloud(const Image& img, const PatchSpaceConfig& cfg,
                             int threads = 1);

}  // namespace topoloss
