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

// PSNR value that keeps "identical images" distinct from any finite number.
class Psnr {
 public:
  static Psnr infinite() noexcept { return Psnr(true, 0.0); }
  static Psnr finite(double db) noexcept { return Psnr(false, db); }

  bool is_infinite() const noexcept { return infinite_; }
  // Throws ArgumentError on the infinite sentinel.
  double decibels() const;

  friend bool operator==(const Psnr&, const Psnr&) = default;

 private:
  Psnr(bool inf, double db) : infinite_(inf), db_(db) {}
  bool infinite_;
  double db_;
};

struct QualityReport {
  Psnr psnr = Psnr::infinite();
  double ssim = 1.0;
};

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// 10 log10(MAX^2 / MSE) with MAX = 2^bit_depth - 1.
Psnr psnr(const Image& reference, const Image& test);

// Mean SSIM over every fully-covered Gaussian window position.
double ssim(const Image& reference, const Image& test, const SsimOptions& options = {});

QualityReport quality(const Image& reference, const Image& test);

}  // namespace topoloss
