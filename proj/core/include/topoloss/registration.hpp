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

#include "topoloss/image.hpp"

namespace topoloss {

// Maps fixed-image coordinates to moving-image coordinates:
//   m = R(theta) (f - c) + c + (tx, ty)
// with x = column, y = row and c the image centre.
struct RigidTransform {
  double tx = 0.0;
  double ty = 0.0;
  double theta = 0.0;  // radians
};

struct RegistrationOptions {
  int levels = 3;
  double initial_step = 1.0;  // pixels at the coarsest level
  double min_step = 1e-4;
  int max_iterations = 400;  // per level
  double gradient_delta = 1e-2;
  // Gaussian prefilter (pixels) applied to both images before matching; 0 disables.
  double smoothing_sigma = 1.0;
};

struct RegistrationResult {
  RigidTransform transform;
  Raster resampled;
  double ncc = 0.0;
  double initial_ncc = 0.0;
  int iterations = 0;
  // The optimizer ended worse than the identity; identity is returned.
  bool warning = false;
};

// Bilinear resampling of `moving` at the transformed fixed grid; samples
// falling outside replicate the nearest edge pixel.
Raster resample_rigid(const Raster& moving, const RigidTransform& transform);

// Pearson correlation of two equally shaped rasters; 0 when either is flat.
double normalized_cross_correlation(const Raster& a, const Raster& b);

// Minimizes -NCC(fixed, resample(moving)) over (tx, ty, theta) by
// coarse-to-fine gradient descent with central-difference gradients and step
// halving.
RegistrationResult register_rigid(const Raster& moving, const Raster& fixed,
                                  const RegistrationOptions& options = {});

}  // namespace topoloss
