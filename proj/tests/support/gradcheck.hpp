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

#include "topoloss/image.hpp"
#include "topoloss/topo_loss.hpp"

namespace fixtures {

struct GradCheck {
  bool tie = false;  // the analytic side reported a tie; nothing compared
  double cosine = 0.0;
  double max_relative_error = 0.0;
  std::size_t compared = 0;
  std::size_t skipped = 0;  // components whose +/-h probes changed structure
};

// Central differences of l_comb against l_comb_subgradient. A component is
// skipped when either probe lands on a different frozen structure, detected
// as a jump in the analytic gradient or a reported tie at the probe.
GradCheck check_gradient(const topoloss::Raster& candidate, const topoloss::Raster& clean,
                         const topoloss::LossConfig& cfg, double h = 1e-5);

// Small-raster settings under which a 16x16 image still yields a cloud.
topoloss::LossConfig small_raster_config(std::uint64_t seed);

// Pair (candidate, clean) of continuous rasters in [0, 1]; the candidate is
// the clean raster plus a perturbation bounded away from zero.
std::pair<topoloss::Raster, topoloss::Raster> random_pair(int width, int height, std::uint64_t seed);

}  // namespace fixtures
