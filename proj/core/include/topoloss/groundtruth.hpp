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
#include <cstdint>
#include <string>
#include <vector>

#include "topoloss/image.hpp"
#include "topoloss/registration.hpp"

namespace topoloss {

// One-sided standard normal 99.9% quantile.
inline constexpr double kDefaultHotPixelConfidence = 3.0902;
// Hot-pixel fractions above this are reported as suspicious.
inline constexpr double kHotPixelWarnFraction = 0.024;

struct FrameStack {
  std::vector<Image> frames;
  std::string scene_id;
  std::vector<int> iso;

  // Throws ArgumentError when empty or when frames differ in shape or depth.
  void validate() const;
};

struct CalibrationProfile {
  double mu = 0.0;     // median of pooled dark pixels
  double sigma = 0.0;  // standard deviation of pooled dark pixels
  double alpha_conf = kDefaultHotPixelConfidence;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> hot_mask;  // row-major, 1 = defective

  static CalibrationProfile empty(int width, int height);

  bool masked(int row, int col) const noexcept {
    return hot_mask[static_cast<std::size_t>(row) * width + col] != 0;
  }
  std::size_t masked_count() const noexcept;
  double masked_fraction() const noexcept;
  bool above_warn_fraction() const noexcept {
    return masked_fraction() > kHotPixelWarnFraction;
  }
};

// Marks pixels whose mean over the dark frames exceeds mu + alpha * sigma.
// Requires at least two frames.
CalibrationProfile calibrate_hot_pixels(const FrameStack& darks,
                                        double alpha_conf = kDefaultHotPixelConfidence);

struct InpaintResult {
  Image image;
  std::size_t replaced = 0;
  // Masked pixels with no unmasked neighbour, filled with the image median.
  std::size_t fallbacks = 0;
};

// Each masked pixel becomes the median of the unmasked in-bounds pixels of
// its 3x3 neighbourhood (mean of the middle two, rounded, for even counts).
InpaintResult inpaint_hot_pixels(const Image& img, const CalibrationProfile& profile);

struct IntensityAlignment {
  std::vector<Raster> frames;  // level units, clamped to the valid range
  std::vector<double> shifts;  // additive shift applied to each frame
  double common_mean = 0.0;
  int iterations = 0;
  double residual = 0.0;  // max |frame mean - common mean|
};

// Iteratively shifts each frame by (common mean - frame mean) until every
// frame mean is within tol of the common mean. Throws ConvergenceError after
// max_iter rounds.
IntensityAlignment align_intensity(const std::vector<Raster>& frames, int bit_depth,
                                   double tol = 1e-3, int max_iter = 100);
IntensityAlignment align_intensity(const FrameStack& stack, double tol = 1e-3,
                                   int max_iter = 100);

struct GroundtruthOptions {
  double align_tol = 1e-3;
  int align_max_iter = 100;
  // Frames whose mean deviates from the median frame mean by more than this
  // relative amount are rejected before alignment.
  double reject_fraction = 0.05;
  bool register_frames = true;
  RegistrationOptions registration;
  int threads = 1;
};

struct FrameReport {
  std::size_t index = 0;
  std::size_t hot_replaced = 0;
  std::size_t hot_fallbacks = 0;
  double raw_mean = 0.0;
  bool rejected_intensity = false;
  double shift = 0.0;
  RigidTransform transform;
  double ncc = 1.0;
  bool rejected_registration = false;
};

struct GroundtruthReport {
  std::vector<FrameReport> frames;
  double median_mean = 0.0;
  double common_mean = 0.0;
  int align_iterations = 0;
  double align_residual = 0.0;
  std::size_t averaged = 0;
};

struct GroundtruthResult {
  Image image;
  GroundtruthReport report;
};

// inpaint -> reject intensity outliers -> align intensity -> register to the
// first surviving frame -> per-pixel mean, rounded half away from zero.
GroundtruthResult estimate_groundtruth(const FrameStack& stack,
                                       const CalibrationProfile& profile,
                                       const GroundtruthOptions& options = {});

// Pairwise (cascade) summation in the given order.
double pairwise_sum(const double* values, std::size_t n) noexcept;

}  // namespace topoloss
