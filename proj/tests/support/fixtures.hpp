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

#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "topoloss/image.hpp"
#include "topoloss/persistence.hpp"
#include "topoloss/registration.hpp"
#include "topoloss/rng.hpp"

namespace fixtures {

// 8-bit procedural scene: shaded background, a handful of hard-edged shapes
// and some oscillating texture, kept inside [30, 225] so moderate noise does
// not clip much.
topoloss::Image natural_like(int width, int height, std::uint64_t seed);

// Adds N(0, sigma) in level units, rounds half away from zero and clamps.
topoloss::Image add_noise(const topoloss::Image& img, double sigma, std::uint64_t seed);

// Smooth analytic intensity field in [0, 1] used where interpolation error
// must not leak into the fixture.
double scene(double x, double y);

// Samples scene at positions mapped through the same rigid model the
// registration uses: R(theta)(p - c) + c + t.
topoloss::Raster sample_scene(int width, int height, const topoloss::RigidTransform& t);

oracle::Points random_cloud(topoloss::SplitMix64& rng, std::size_t n, std::size_t dim);

std::vector<oracle::Pair> to_pairs(const topoloss::PersistenceDiagram& d);
std::vector<oracle::Point2> finite_points(const topoloss::PersistenceDiagram& d, int dim);

topoloss::PersistenceDiagram make_diagram(const std::vector<oracle::Point2>& points, int dim = 0);

}  // namespace fixtures
