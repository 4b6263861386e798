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
#include <utility>
#include <vector>

#include "topoloss/diagram_distance.hpp"
#include "topoloss/image.hpp"
#include "topoloss/patch_space.hpp"

namespace topoloss {

enum class BaseLoss { kL1, kL2 };

struct LossConfig {
  double alpha = 0.93;  // weight of the topological term
  double beta = 0.07;   // weight of the pixel-space term
  BaseLoss base = BaseLoss::kL1;
  double p = 2.0;
  std::vector<int> dims{0};
  PatchSpaceConfig patch;
  EssentialMode essential = EssentialMode::kExclude;
  int threads = 1;

  void validate() const;
};

struct TopologicalLoss {
  double value = 0.0;
  DiagramMatching matching;
  std::pair<std::size_t, std::size_t> cloud_sizes{0, 0};
};

struct LossReport {
  double l_top = 0.0;
  double l_base = 0.0;
  double l_comb = 0.0;
  DiagramMatching matching;
  std::pair<std::size_t, std::size_t> cloud_sizes{0, 0};
};

// Mean |a - b| or mean (a - b)^2. Images are compared on unit-normalized values.
double l_base(const Raster& a, const Raster& b, BaseLoss base);
double l_base(const Image& a, const Image& b, BaseLoss base);

// W_p between the Rips diagrams of the two patch clouds, both sampled with
// cfg.patch (same seed). DegenerateInputError names the offending image.
TopologicalLoss l_top(const Raster& noisy, const Raster& clean, const LossConfig& cfg);
TopologicalLoss l_top(const Image& noisy, const Image& clean, const LossConfig& cfg);

// alpha * l_top + beta * l_base.
LossReport l_comb(const Raster& noisy, const Raster& clean, const LossConfig& cfg);
LossReport l_comb(const Image& noisy, const Image& clean, const LossConfig& cfg);

struct Subgradient {
  Raster gradient;
  LossReport report;
  // Set when the frozen structure sits on a tie (D-norm or density cut,
  // equal edge lengths, zero-distance match, zero loss, L1 kink); the
  // gradient then follows the documented tie-breaks.
  bool tie_detected = false;
  std::vector<std::string> ties;
};

// Gradient of l_comb(candidate, clean) w.r.t. the candidate's unit-normalized
// pixels, holding the patch sample, the filtration edges realizing each
// diagram value and the optimal matching fixed at the current point. The
// candidate is treated as continuous-valued; clean is a constant.
Subgradient l_comb_subgradient(const Raster& candidate, const Raster& clean,
                               const LossConfig& cfg);
Subgradient l_comb_subgradient(const Raster& candidate, const Image& clean,
                               const LossConfig& cfg);

}  // namespace topoloss
