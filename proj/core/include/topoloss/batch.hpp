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
#include <vector>

#include "topoloss/topo_loss.hpp"

namespace topoloss {

// In-memory batch surface for foreign-language training loops. Buffers are
// B x H x W row-major, unit-normalized, borrowed for the duration of the call.
struct BatchShape {
  std::size_t batch = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t item_size() const noexcept { return height * width; }
  std::size_t total() const noexcept { return batch * item_size(); }
};

// Item i equals l_comb(candidate_i, target_i, cfg). All inputs are validated
// before any item is evaluated, so a bad shape never yields partial results.
std::vector<LossReport> batch_loss(std::span<const double> candidates,
                                   std::span<const double> targets, BatchShape shape,
                                   const LossConfig& cfg);

// Concatenated per-item l_comb_subgradient rasters, same layout as candidates.
std::vector<double> batch_grad(std::span<const double> candidates,
                               std::span<const double> targets, BatchShape shape,
                               const LossConfig& cfg);

}  // namespace topoloss
