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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "topoloss/error.hpp"
#include "topoloss/groundtruth.hpp"
#include "topoloss/metrics.hpp"
#include "topoloss/registration.hpp"
#include "topoloss/rng.hpp"

namespace {

using namespace topoloss;

Image filled(int w, int h, std::uint16_t v, int depth = 8) {
  return Image(w, h, depth, std::vector<std::uint16_t>(static_cast<std::size_t>(w) * h, v));
}

Image with_pixel(const Image& img, int r, int c, std::uint16_t v) {
  std::vector<std::uint16_t> px(img.pixels().begin(), img.pixels().end());
  px[static_cast<std::size_t>(r) * img.width() + c] = v;
  return Image(img.width(), img.height(), img.bit_depth(), std::move(px));
}

CalibrationProfile mask_of(int w, int h, std::initializer_list<std::pair<int, int>> hot) {
  CalibrationProfile p = CalibrationProfile::empty(w, h);
  for (auto [r, c] : hot) p.hot_mask[static_cast<std::size_t>(r) * w + c] = 1;
  return p;
}

Image scene_image(int w, int h, const RigidTransform& t) {
  const Raster r = fixtures::sample_scene(w, h, t);
  Raster levels(w, h);
  for (std::size_t i = 0; i < r.size(); ++i) levels.values[i] = 40.0 + 170.0 * r.values[i];
  return from_level_raster(levels, 8);
}

double rmse(const Image& a, const Image& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) {
    const double d = static_cast<double>(a.pixels()[i]) - b.pixels()[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.pixels().size()));
}

TEST(Calibrate, SingleExtremeOutlier) {
  FrameStack darks;
  for (int i = 0; i < 3; ++i) darks.frames.push_back(with_pixel(filled(16, 12, 100, 16), 5, 7, 10000));
  const auto p = calibrate_hot_pixels(darks);
  EXPECT_EQ(p.masked_count(), 1u);
  EXPECT_TRUE(p.masked(5, 7));
  EXPECT_EQ(p.mu, 100.0);
  EXPECT_EQ(p.alpha_conf, kDefaultHotPixelConfidence);
}

TEST(Calibrate, ConstantDarksMaskNothing) {
  FrameStack darks;
  darks.frames = {filled(8, 8, 50), filled(8, 8, 50)};
  const auto p = calibrate_hot_pixels(darks);
  EXPECT_EQ(p.sigma, 0.0);
  EXPECT_EQ(p.masked_count(), 0u);
}

TEST(Calibrate, GaussianFixedPatternMasksAboutOnePerMille) {
  const int w = 1000, h = 1000;
  SplitMix64 rng(2024);
  std::vector<std::uint16_t> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = static_cast<std::uint16_t>(std::clamp(std::round(100.0 + 5.0 * rng.normal()), 0.0, 255.0));
  FrameStack darks;
  darks.frames = {Image(w, h, 8, px), Image(w, h, 8, px)};
  const auto p = calibrate_hot_pixels(darks);
  EXPECT_NEAR(p.masked_fraction(), 0.001, 0.0005);
  EXPECT_FALSE(p.above_warn_fraction());
}

TEST(Calibrate, NeedsTwoFrames) {
  FrameStack one;
  one.frames = {filled(4, 4, 1)};
  EXPECT_THROW(calibrate_hot_pixels(one), ArgumentError);
  EXPECT_THROW(calibrate_hot_pixels(FrameStack{}), ArgumentError);
}

TEST(Calibrate, WarnFraction) {
  FrameStack darks;
  std::vector<std::uint16_t> px(100, 10);
  for (int i = 0; i < 5; ++i) px[i * 7] = 200;
  darks.frames = {Image(10, 10, 8, px), Image(10, 10, 8, px)};
  const auto p = calibrate_hot_pixels(darks, 1.0);
  EXPECT_EQ(p.masked_count(), 5u);
  EXPECT_TRUE(p.above_warn_fraction());
}

TEST(Inpaint, InteriorPixelTakesNeighbourMedian) {
  const Image img = with_pixel(filled(5, 5, 100), 2, 2, 4000 % 256);
  const auto r = inpaint_hot_pixels(img, mask_of(5, 5, {{2, 2}}));
  EXPECT_EQ(r.image, filled(5, 5, 100));
  EXPECT_EQ(r.replaced, 1u);
}

TEST(Inpaint, EmptyMaskIsIdentity) {
  const Image img = fixtures::natural_like(20, 20, 1);
  EXPECT_EQ(inpaint_hot_pixels(img, CalibrationProfile::empty(20, 20)).image, img);
}

TEST(Inpaint, CornerMedianOfThree) {
  std::vector<std::uint16_t> px(9, 0);
  px[0] = 250;
  px[1] = 10;
  px[3] = 30;
  px[4] = 20;
  const auto r = inpaint_hot_pixels(Image(3, 3, 8, px), mask_of(3, 3, {{0, 0}}));
  EXPECT_EQ(r.image.at(0, 0), 20);
}

TEST(Inpaint, EvenCountAveragesMiddlePair) {
  std::vector<std::uint16_t> px{0, 10, 0, 21, 0, 0, 0, 0, 0};
  // Corner (0,0): neighbours (0,1)=10, (1,0)=21, (1,1) masked.
  const auto r = inpaint_hot_pixels(Image(3, 3, 8, px), mask_of(3, 3, {{0, 0}, {1, 1}}));
  EXPECT_EQ(r.image.at(0, 0), 16);
}

TEST(Inpaint, TouchesOnlyMaskedPixels) {
  const Image img = fixtures::natural_like(30, 30, 2);
  SplitMix64 rng(3);
  CalibrationProfile p = CalibrationProfile::empty(30, 30);
  for (int i = 0; i < 40; ++i) p.hot_mask[rng.uniform_below(900)] = 1;
  const auto r = inpaint_hot_pixels(img, p);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x)
      if (!p.masked(y, x)) EXPECT_EQ(r.image.at(y, x), img.at(y, x));
}

TEST(Inpaint, FallbackWhenNeighbourhoodFullyMasked) {
  std::vector<std::uint16_t> px(25, 7);
  const Image img(5, 5, 8, px);
  CalibrationProfile p = CalibrationProfile::empty(5, 5);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) p.hot_mask[y * 5 + x] = 1;
  const auto r = inpaint_hot_pixels(img, p);
  EXPECT_EQ(r.fallbacks, 4u);
  EXPECT_EQ(r.image.at(1, 1), 7);
  EXPECT_THROW(inpaint_hot_pixels(img, CalibrationProfile::empty(4, 5)), ArgumentError);
}

TEST(Align, ArithmeticMeanShifts) {
  const std::vector<Raster> frames{Raster(4, 4, 10.0), Raster(4, 4, 12.0), Raster(4, 4, 14.0)};
  const auto a = align_intensity(frames, 8);
  EXPECT_EQ(a.common_mean, 12.0);
  EXPECT_EQ(a.shifts, (std::vector<double>{2.0, 0.0, -2.0}));
  EXPECT_EQ(a.iterations, 2);
  for (const auto& f : a.frames)
    for (double v : f.values) EXPECT_EQ(v, 12.0);
}

TEST(Align, SingleAndEqualFramesAreFixedPoints) {
  const Image img = fixtures::natural_like(12, 12, 3);
  FrameStack one;
  one.frames = {img};
  const auto a = align_intensity(one);
  EXPECT_EQ(a.frames.front(), to_level_raster(img));
  EXPECT_EQ(a.iterations, 1);
  FrameStack same;
  same.frames = {img, img, img};
  const auto b = align_intensity(same);
  EXPECT_EQ(b.shifts, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_EQ(b.iterations, 1);
}

TEST(Align, ClampsAndConvergesOrReportsResidual) {
  Raster bright(4, 4, 250.0), dark(4, 4, 5.0);
  bright.values[0] = 10.0;
  const auto a = align_intensity({bright, dark}, 8);
  EXPECT_LE(a.residual, 1e-3);
  for (const auto& f : a.frames)
    for (double v : f.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 255.0);
    }
  try {
    align_intensity({Raster(2, 2, 10.0), Raster(2, 2, 20.0)}, 8, 1e-3, 1);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.residual(), 5.0);
  }
}

TEST(Align, PreservesPixelOrderWithoutClamping) {
  const Image a = fixtures::natural_like(16, 16, 4);
  const Image b = fixtures::add_noise(a, 6.0, 4);
  FrameStack s;
  s.frames = {a, b};
  const auto r = align_intensity(s);
  for (std::size_t f = 0; f < 2; ++f) {
    const Raster orig = to_level_raster(s.frames[f]);
    for (std::size_t i = 0; i + 1 < orig.size(); ++i) {
      if (orig.values[i] < orig.values[i + 1]) EXPECT_LT(r.frames[f].values[i], r.frames[f].values[i + 1]);
    }
  }
}

TEST(Register, SelfRegistrationIsIdentity) {
  const Raster img = fixtures::sample_scene(96, 96, {});
  const auto r = register_rigid(img, img);
  EXPECT_LT(std::abs(r.transform.tx), 0.05);
  EXPECT_LT(std::abs(r.transform.ty), 0.05);
  EXPECT_LT(std::abs(r.transform.theta), 0.001);
}

TEST(Register, RecoversTranslation) {
  const Raster moving = fixtures::sample_scene(128, 128, {});
  const Raster fixed = fixtures::sample_scene(128, 128, {-2.0, 0.0, 0.0});
  const auto r = register_rigid(moving, fixed);
  EXPECT_NEAR(r.transform.tx, -2.0, 0.1);
  EXPECT_NEAR(r.transform.ty, 0.0, 0.1);
  EXPECT_GT(r.ncc, r.initial_ncc);
}

TEST(Register, RecoversRotation) {
  const double deg = std::numbers::pi / 180.0;
  const Raster moving = fixtures::sample_scene(128, 128, {});
  const Raster fixed = fixtures::sample_scene(128, 128, {0.0, 0.0, -deg});
  const auto r = register_rigid(moving, fixed);
  EXPECT_NEAR(r.transform.theta / deg, -1.0, 0.05);
}

TEST(Register, ResampleIdentityAndNcc) {
  const Raster img = fixtures::sample_scene(32, 32, {});
  EXPECT_EQ(resample_rigid(img, {}), img);
  EXPECT_NEAR(normalized_cross_correlation(img, img), 1.0, 1e-12);
  Raster neg = img;
  for (auto& v : neg.values) v = 1.0 - v;
  EXPECT_NEAR(normalized_cross_correlation(img, neg), -1.0, 1e-12);
}

TEST(Groundtruth, IdenticalFramesAreFixedPoint) {
  const Image img = fixtures::natural_like(48, 48, 5);
  FrameStack s;
  s.frames = {img, img, img, img};
  const auto r = estimate_groundtruth(s, CalibrationProfile::empty(48, 48));
  EXPECT_EQ(r.image, img);
  EXPECT_EQ(r.report.averaged, 4u);
}

TEST(Groundtruth, MixedSizesRejected) {
  FrameStack s;
  s.frames = {filled(8, 8, 1), filled(8, 9, 1)};
  EXPECT_THROW(estimate_groundtruth(s, CalibrationProfile::empty(8, 8)), ArgumentError);
  FrameStack one;
  one.frames = {filled(8, 8, 1)};
  EXPECT_THROW(estimate_groundtruth(one, CalibrationProfile::empty(8, 8)), ArgumentError);
}

TEST(Groundtruth, AveragingBeatsNoiseBound) {
  const Image clean = scene_image(64, 64, {});
  FrameStack s;
  for (int i = 0; i < 30; ++i) s.frames.push_back(fixtures::add_noise(clean, 10.0, 500 + i));
  const auto r = estimate_groundtruth(s, CalibrationProfile::empty(64, 64));
  EXPECT_LT(rmse(r.image, clean), 10.0 / std::sqrt(30.0) * 1.2);
}

TEST(Groundtruth, RegistrationSharpensShiftedStack) {
  const Image clean = scene_image(96, 96, {});
  FrameStack s;
  for (int i = 0; i < 6; ++i) {
    const RigidTransform t = i == 3 ? RigidTransform{2.0, 0.0, 0.0} : RigidTransform{};
    s.frames.push_back(fixtures::add_noise(scene_image(96, 96, t), 3.0, 900 + i));
  }
  GroundtruthOptions plain;
  plain.register_frames = false;
  const auto registered = estimate_groundtruth(s, CalibrationProfile::empty(96, 96));
  const auto naive = estimate_groundtruth(s, CalibrationProfile::empty(96, 96), plain);
  EXPECT_GT(psnr(clean, registered.image).decibels(), psnr(clean, naive.image).decibels());
  EXPECT_NEAR(registered.report.frames[3].transform.tx, -2.0, 0.1);
}

TEST(Groundtruth, PermutationCovariant) {
  const Image clean = scene_image(64, 64, {});
  FrameStack s;
  for (int i = 0; i < 6; ++i) s.frames.push_back(fixtures::add_noise(clean, 8.0, 40 + i));
  const auto a = estimate_groundtruth(s, CalibrationProfile::empty(64, 64));
  std::reverse(s.frames.begin() + 1, s.frames.end());
  const auto b = estimate_groundtruth(s, CalibrationProfile::empty(64, 64));
  for (std::size_t i = 0; i < a.image.pixels().size(); ++i) {
    EXPECT_LE(std::abs(static_cast<int>(a.image.pixels()[i]) - static_cast<int>(b.image.pixels()[i])), 1);
  }
}

TEST(Groundtruth, RejectsFramesFarFromMedianMean) {
  const Image img = fixtures::natural_like(32, 32, 6);
  std::vector<std::uint16_t> px(img.pixels().begin(), img.pixels().end());
  for (auto& p : px) p = static_cast<std::uint16_t>(std::min(255, p + 30));
  FrameStack s;
  s.frames = {img, img, Image(32, 32, 8, px), img};
  GroundtruthOptions opts;
  opts.register_frames = false;
  const auto r = estimate_groundtruth(s, CalibrationProfile::empty(32, 32), opts);
  EXPECT_TRUE(r.report.frames[2].rejected_intensity);
  EXPECT_EQ(r.report.averaged, 3u);
  EXPECT_EQ(r.image, img);
}

TEST(PairwiseSum, ExactOnSmallIntegers) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v.data(), v.size()), 499500.0);
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
}

}  // namespace
