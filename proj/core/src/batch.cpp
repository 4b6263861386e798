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

#include "topoloss/batch.hpp"

#include <string>

#include "topoloss/error.hpp"

namespace topoloss {
namespace {

void check_request(std::span<const double> candidates, std::span<const double> targets,
                   BatchShape shape, const LossConfig& cfg) {
  if (shape.batch == 0) throw ArgumentError("batch must contain at least one item");
  if (shape.height == 0 || shape.width == 0) throw ArgumentError("raster shape must be positive");
  if (candidates.size() != shape.total() || targets.size() != shape.total()) {
    throw ArgumentError("buffer sizes (" + std::to_string(candidates.size()) + ", " +
                        std::to_string(targets.size()) + ") do not match batch shape " +
                        std::to_string(shape.batch) + "x" + std::to_string(shape.height) + "x" +
                        std::to_string(shape.width));
  }
  cfg.validate();
}

Raster item(std::span<const double> buffer, BatchShape shape, std::size_t i) {
  const auto slice = buffer.subspan(i * shape.item_size(), shape.item_size());
  return Raster(static_cast<int>(shape.width), static_cast<int>(shape.height),
                std::vector<double>(slice.begin(), slice.end()));
}

}  // namespace

std::vector<LossReport> batch_loss(std::span<const double> candidates,
                                   std::span<const double> targets, BatchShape shape,
                                   const LossConfig& cfg) {
  check_request(candidates, targets, shape, cfg);
  std::vector<LossReport> out;
  out.reserve(shape.batch);
  for (std::size_t i = 0; i < shape.batch; ++i) {
    out.push_back(l_comb(item(candidates, shape, i), item(targets, shape, i), cfg));
  }
  return out;
}

std::vector<double> batch_grad(std::span<const double> candidates,
                               std::span<const double> targets, BatchShape shape,
                               const LossConfig& cfg) {
  check_request(candidates, targets, shape, cfg);
  std::vector<double> out;
  out.reserve(shape.total());
  for (std::size_t i = 0; i < shape.batch; ++i) {
    const auto g = l_comb_subgradient(item(candidates, shape, i), item(targets, shape, i), cfg);
    out.insert(out.end(), g.gradient.values.begin(), g.gradient.values.end());
  }
  return out;
}

}  // namespace topoloss
