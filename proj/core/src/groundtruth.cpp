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

#include "topoloss/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "topoloss/error.hpp"
#include "topoloss/parallel.hpp"

namespace topoloss {
namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

std::uint16_t median_level(std::vector<std::uint16_t>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return static_cast<std::uint16_t>((static_cast<std::uint32_t>(v[mid - 1]) + v[mid] + 1) / 2);
}

double raster_mean(const Raster& r) { return pairwise_sum(r.values.data(), r.size()) / r.size(); }

}  // namespace

double pairwise_sum(const double* values, std::size_t n) noexcept {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

void FrameStack::validate() const {
  if (frames.empty()) throw ArgumentError("frame stack is empty");
  for (const Image& f : frames) {
    if (!f.same_shape(frames.front()) || f.bit_depth() != frames.front().bit_depth()) {
      throw ArgumentError("frames differ in dimensions or bit depth");
    }
  }
}

CalibrationProfile CalibrationProfile::empty(int width, int height) {
  CalibrationProfile p;
  p.width = width;
  p.height = height;
  p.hot_mask.assign(static_cast<std::size_t>(width) * height, 0);
  return p;
}

std::size_t CalibrationProfile::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count(hot_mask.begin(), hot_mask.end(), 1));
}

double CalibrationProfile::masked_fraction() const noexcept {
  return hot_mask.empty() ? 0.0 : static_cast<double>(masked_count()) / hot_mask.size();
}

CalibrationProfile calibrate_hot_pixels(const FrameStack& darks, double alpha_conf) {
  darks.validate();
  if (darks.frames.size() < 2) throw ArgumentError("hot-pixel calibration needs at least two dark frames");
  if (!std::isfinite(alpha_conf)) throw ArgumentError("alpha_conf must be finite");
  const Image& first = darks.frames.front();
  const std::size_t n = first.size();

  std::vector<double> pooled;
  pooled.reserve(n * darks.frames.size());
  std::vector<double> pixel_sum(n, 0.0);
  for (const Image& f : darks.frames) {
    const auto px = f.pixels();
    for (std::size_t i = 0; i < n; ++i) {
      pooled.push_back(px[i]);
      pixel_sum[i] += px[i];
    }
  }
  const double mean = pairwise_sum(pooled.data(), pooled.size()) / pooled.size();
  std::vector<double> sq(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) sq[i] = (pooled[i] - mean) * (pooled[i] - mean);
  const double sigma = std::sqrt(pairwise_sum(sq.data(), sq.size()) / sq.size());

  CalibrationProfile profile = CalibrationProfile::empty(first.width(), first.height());
  profile.mu = median_of(std::move(pooled));
  profile.sigma = sigma;
  profile.alpha_conf = alpha_conf;
  const double threshold = profile.mu + alpha_conf * sigma;
  const double frames = static_cast<double>(darks.frames.size());
  for (std::size_t i = 0; i < n; ++i) profile.hot_mask[i] = pixel_sum[i] / frames > threshold ? 1 : 0;
  return profile;
}

InpaintResult inpaint_hot_pixels(const Image& img, const CalibrationProfile& profile) {
  if (profile.width != img.width() || profile.height != img.height() ||
      profile.hot_mask.size() != img.size()) {
    throw ArgumentError("calibration profile does not match the image dimensions");
  }
  InpaintResult result;
  std::vector<std::uint16_t> out(img.pixels().begin(), img.pixels().end());
  std::vector<std::uint16_t> neighbours;
  bool have_fallback = false;
  std::uint16_t fallback = 0;
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (!profile.masked(r, c)) continue;
      neighbours.clear();
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= img.height() || cc >= img.width()) continue;
          if (!profile.masked(rr, cc)) neighbours.push_back(img.at(rr, cc));
        }
      }
      std::uint16_t value;
      if (!neighbours.empty()) {
        value = median_level(neighbours);
      } else {
        if (!have_fallback) {
          std::vector<std::uint16_t> all;
          for (std::size_t i = 0; i < img.size(); ++i) {
            if (!profile.hot_mask[i]) all.push_back(img.pixels()[i]);
          }
          if (all.empty()) all.assign(img.pixels().begin(), img.pixels().end());
          fallback = median_level(all);
          have_fallback = true;
        }
        value = fallback;
        ++result.fallbacks;
      }
      out[static_cast<std::size_t>(r) * img.width() + c] = value;
      ++result.replaced;
    }
  }
  result.image = Image(img.width(), img.height(), img.bit_depth(), std::move(out));
  return result;
}

IntensityAlignment align_intensity(const std::vector<Raster>& frames, int bit_depth, double tol,
                                   int max_iter) {
  if (frames.empty()) throw ArgumentError("intensity alignment needs at least one frame");
  if (max_iter <= 0) throw ArgumentError("max_iter must be positive");
  const double top = bit_depth == 16 ? 65535.0 : 255.0;
  const std::size_t count = frames.size();
  IntensityAlignment out;
  out.shifts.assign(count, 0.0);
  std::vector<double> means(count);
  std::vector<Raster> shifted = frames;
  for (int iter = 1; iter <= max_iter; ++iter) {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < frames[i].size(); ++k) {
        shifted[i].values[k] = std::clamp(frames[i].values[k] + out.shifts[i], 0.0, top);
      }
      means[i] = raster_mean(shifted[i]);
    }
    const double common = pairwise_sum(means.data(), count) / count;
    double residual = 0.0;
    for (double m : means) residual = std::max(residual, std::abs(m - common));
    out.common_mean = common;
    out.residual = residual;
    out.iterations = iter;
    if (residual <= tol) {
      out.frames = std::move(shifted);
      return out;
    }
    for (std::size_t i = 0; i < count; ++i) out.shifts[i] += common - means[i];
  }
  throw ConvergenceError("intensity alignment did not converge in " + std::to_string(max_iter) +
                             " iterations (residual " + std::to_string(out.residual) + ")",
                         out.residual);
}

IntensityAlignment align_intensity(const FrameStack& stack, double tol, int max_iter) {
  stack.validate();
  std::vector<Raster> frames;
  for (const Image& f : stack.frames) frames.push_back(to_level_raster(f));
  return align_intensity(frames, stack.frames.front().bit_depth(), tol, max_iter);
}

GroundtruthResult estimate_groundtruth(const FrameStack& stack, const CalibrationProfile& profile,
                                       const GroundtruthOptions& options) {
  stack.validate();
  if (stack.frames.size() < 2) throw ArgumentError("groundtruth estimation needs at least two frames");
  const std::size_t count = stack.frames.size();
  const int depth = stack.frames.front().bit_depth();

  GroundtruthResult result;
  GroundtruthReport& report = result.report;
  report.frames.resize(count);

  std::vector<Image> cleaned(count);
  parallel_for(count, options.threads, [&](std::size_t i) {
    InpaintResult ip = inpaint_hot_pixels(stack.frames[i], profile);
    report.frames[i].index = i;
    report.frames[i].hot_replaced = ip.replaced;
    report.frames[i].hot_fallbacks = ip.fallbacks;
    cleaned[i] = std::move(ip.image);
  });

  std::vector<Raster> levels(count);
  std::vector<double> means(count);
  for (std::size_t i = 0; i < count; ++i) {
    levels[i] = to_level_raster(cleaned[i]);
    means[i] = raster_mean(levels[i]);
    report.frames[i].raw_mean = means[i];
  }
  report.median_mean = median_of(means);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(means[i] - report.median_mean) > options.reject_fraction * report.median_mean) {
      report.frames[i].rejected_intensity = true;
    } else {
      kept.push_back(i);
    }
  }
  if (kept.empty()) throw DegenerateInputError("every frame was rejected by the intensity rule");

  std::vector<Raster> kept_levels;
  for (auto i : kept) kept_levels.push_back(levels[i]);
  IntensityAlignment aligned =
      align_intensity(kept_levels, depth, options.align_tol, options.align_max_iter);
  report.common_mean = aligned.common_mean;
  report.align_iterations = aligned.iterations;
  report.align_residual = aligned.residual;
  for (std::size_t k = 0; k < kept.size(); ++k) report.frames[kept[k]].shift = aligned.shifts[k];

  std::vector<Raster> registered(kept.size());
  std::vector<char> accepted(kept.size(), 1);
  registered[0] = aligned.frames[0];
  parallel_for(kept.size() - 1, options.threads, [&](std::size_t j) {
    const std::size_t k = j + 1;
    FrameReport& fr = report.frames[kept[k]];
    if (!options.register_frames) {
      registered[k] = aligned.frames[k];
      return;
    }
    RegistrationResult reg = register_rigid(aligned.frames[k], aligned.frames[0], options.registration);
    fr.transform = reg.transform;
    fr.ncc = reg.ncc;
    if (reg.warning) {
      fr.rejected_registration = true;
      accepted[k] = 0;
      return;
    }
    registered[k] = std::move(reg.resampled);
  });

  std::vector<const Raster*> use;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (accepted[k]) use.push_back(&registered[k]);
  }
  report.averaged = use.size();
  const Raster& ref = *use.front();
  Raster mean(ref.width, ref.height);
  std::vector<double> column(use.size());
  for (std::size_t px = 0; px < ref.size(); ++px) {
    for (std::size_t f = 0; f < use.size(); ++f) column[f] = use[f]->values[px];
    mean.values[px] = pairwise_sum(column.data(), column.size()) / static_cast<double>(use.size());
  }
  result.image = from_level_raster(mean, depth);
  return result;
}

}  // namespace topoloss
