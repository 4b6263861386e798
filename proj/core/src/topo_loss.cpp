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

#include "topoloss/topo_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "topoloss/error.hpp"
#include "topoloss/persistence.hpp"

namespace topoloss {
namespace {

// Below this the loss is treated as an exact self-match (the root in W_p is
// not differentiable at zero).
constexpr double kSelfMatchThreshold = 1e-12;

void check_same_shape(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) {
    throw ArgumentError("raster dimensions differ: " + std::to_string(a.width) + "x" +
                        std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                        std::to_string(b.height));
  }
}

int max_dim(const LossConfig& cfg) { return *std::max_element(cfg.dims.begin(), cfg.dims.end()); }

PatchCloud named_cloud(const Raster& raster, const LossConfig& cfg, const char* name) {
  try {
    return build_patch_cloud(raster, cfg.patch, cfg.threads);
  } catch (const DegenerateInputError& e) {
    throw DegenerateInputError(std::string(name) + " image: " + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(std::string(name) + " image: " + e.what());
  }
}

struct Evaluated {
  PatchCloud cloud_a;
  PatchCloud cloud_b;
  PersistenceDiagram diag_a;
  PersistenceDiagram diag_b;
  DiagramMatching matching;
};

Evaluated evaluate_top(const Raster& a, const Raster& b, const LossConfig& cfg) {
  cfg.validate();
  Evaluated ev;
  ev.cloud_a = named_cloud(a, cfg, "noisy");
  ev.cloud_b = named_cloud(b, cfg, "clean");
  const FiltrationSpec spec{max_dim(cfg), std::nullopt};
  ev.diag_a = vr_diagram(PointCloud(ev.cloud_a.points), spec);
  ev.diag_b = vr_diagram(PointCloud(ev.cloud_b.points), spec);
  ev.matching = wasserstein(ev.diag_a, ev.diag_b, cfg.p, cfg.dims, cfg.essential);
  return ev;
}

std::size_t cut_count(double fraction, std::size_t n) {
  const double raw = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

// Flags whose presence means the frozen structure sits on a tie.
void detect_pipeline_ties(const Raster& candidate, const LossConfig& cfg,
                          std::vector<std::string>& ties) {
  const auto patches = extract_patches(candidate, cfg.patch.stride);
  std::vector<double> norms;
  norms.reserve(patches.size());
  for (const auto& p : patches) norms.push_back(d_norm(p));
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t top = cut_count(cfg.patch.contrast_fraction, sorted.size());
  if (top < sorted.size() && sorted[top - 1] == sorted[top]) ties.emplace_back("d-norm cut");

  const auto selected = select_top_contrast(patches, cfg.patch.contrast_fraction);
  const auto normalized = normalize_to_sphere(selected);
  if (normalized.points.size() <= static_cast<std::size_t>(cfg.patch.k)) return;
  auto scores = k_nearest_distances(normalized.points, cfg.patch.k, cfg.threads);
  std::sort(scores.begin(), scores.end());
  const std::size_t keep = cut_count(cfg.patch.density_fraction, scores.size());
  if (keep < scores.size() && scores[keep - 1] == scores[keep]) ties.emplace_back("k-density cut");
}

void detect_edge_ties(const PatchCloud& cloud, const PersistenceDiagram& diag,
                      std::vector<std::string>& ties) {
  const auto dist = distance_matrix(PointCloud(cloud.points));
  std::multiset<double> lengths;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    for (std::size_t j = i + 1; j < dist.size(); ++j) lengths.insert(dist(i, j));
  }
  for (const auto& pr : diag.pairs) {
    for (const Edge& e : {pr.birth_edge, pr.death_edge}) {
      if (e.valid() && lengths.count(dist(e.a, e.b)) > 1) {
        ties.emplace_back("equal filtration edge lengths");
        return;
      }
    }
  }
}

// d(value)/d(point) for a value realized as |x_a - x_b|.
void push_edge_gradient(const PatchCloud& cloud, const Edge& e, double value, double weight,
                        std::vector<PatchVector>& grad) {
  if (!e.valid() || weight == 0.0 || value <= 0.0) return;
  const auto& xa = cloud.points[e.a];
  const auto& xb = cloud.points[e.b];
  for (int k = 0; k < kPatchDim; ++k) {
    const double g = weight * (xa[k] - xb[k]) / value;
    grad[e.a][k] += g;
    grad[e.b][k] -= g;
  }
}

}  // namespace

void LossConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ArgumentError("loss weights alpha and beta must be finite and non-negative");
  }
  if (!(alpha + beta > 0.0)) throw ArgumentError("alpha + beta must be positive");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ArgumentError("p must be a finite real >= 1");
  if (dims.empty()) throw ArgumentError("at least one homology dimension is required");
  for (int d : dims) {
    if (d < 0 || d > 1) throw ArgumentError("homology dimensions must be 0 or 1");
  }
  if (threads < 0) throw ArgumentError("threads must be non-negative");
  patch.validate();
}

double l_base(const Raster& a, const Raster& b, BaseLoss base) {
  check_same_shape(a, b);
  if (a.size() == 0) throw ArgumentError("empty raster");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum += base == BaseLoss::kL1 ? std::abs(d) : d * d;
  }
  return sum / static_cast<double>(a.size());
}

double l_base(const Image& a, const Image& b, BaseLoss base) {
  return l_base(to_unit_raster(a), to_unit_raster(b), base);
}

TopologicalLoss l_top(const Raster& noisy, const Raster& clean, const LossConfig& cfg) {
  Evaluated ev = evaluate_top(noisy, clean, cfg);
  TopologicalLoss out;
  out.value = ev.matching.cost;
  out.cloud_sizes = {ev.cloud_a.size(), ev.cloud_b.size()};
  out.matching = std::move(ev.matching);
  return out;
}

TopologicalLoss l_top(const Image& noisy, const Image& clean, const LossConfig& cfg) {
  return l_top(to_unit_raster(noisy), to_unit_raster(clean), cfg);
}

LossReport l_comb(const Raster& noisy, const Raster& clean, const LossConfig& cfg) {
  cfg.validate();
  check_same_shape(noisy, clean);
  LossReport report;
  report.l_base = l_base(noisy, clean, cfg.base);
  TopologicalLoss top = l_top(noisy, clean, cfg);
  report.l_top = top.value;
  report.matching = std::move(top.matching);
  report.cloud_sizes = top.cloud_sizes;
  report.l_comb = cfg.alpha * report.l_top + cfg.beta * report.l_base;
  return report;
}

LossReport l_comb(const Image& noisy, const Image& clean, const LossConfig& cfg) {
  if (!noisy.same_shape(clean)) {
    throw ArgumentError("image dimensions differ: " + std::to_string(noisy.width()) + "x" +
                        std::to_string(noisy.height()) + " vs " + std::to_string(clean.width()) +
                        "x" + std::to_string(clean.height()));
  }
  return l_comb(to_unit_raster(noisy), to_unit_raster(clean), cfg);
}

Subgradient l_comb_subgradient(const Raster& candidate_in, const Raster& clean,
                               const LossConfig& cfg) {
  cfg.validate();
  check_same_shape(candidate_in, clean);
  Raster candidate = candidate_in;
  candidate.max_level = 0;

  Subgradient out;
  Evaluated ev = evaluate_top(candidate, clean, cfg);
  LossReport& report = out.report;
  report.l_top = ev.matching.cost;
  report.l_base = l_base(candidate, clean, cfg.base);
  report.l_comb = cfg.alpha * report.l_top + cfg.beta * report.l_base;
  report.cloud_sizes = {ev.cloud_a.size(), ev.cloud_b.size()};

  out.gradient = Raster(candidate.width, candidate.height);
  const double n = static_cast<double>(candidate.size());
  bool l1_kink = false;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const double d = candidate.values[i] - clean.values[i];
    double g = 0.0;
    if (cfg.base == BaseLoss::kL2) {
      g = 2.0 * d / n;
    } else if (d != 0.0) {
      g = (d > 0.0 ? 1.0 : -1.0) / n;
    } else {
      l1_kink = true;
    }
    out.gradient.values[i] = cfg.beta * g;
  }
  if (l1_kink && cfg.beta > 0.0) out.ties.emplace_back("l1 zero residual");

  const double p = cfg.p;
  const double w = report.l_top;
  if (cfg.alpha > 0.0 && w <= kSelfMatchThreshold) out.ties.emplace_back("zero topological loss");
  if (cfg.alpha > 0.0 && w > kSelfMatchThreshold) {
    // W = S^(1/p): dW/dS = S^(1/p - 1) / p = W^(1 - p) / p.
    const double outer = cfg.alpha * std::pow(w, 1.0 - p) / p;
    std::vector<PatchVector> point_grad(ev.cloud_a.size(), PatchVector{});
    const auto& xs = ev.diag_a.pairs;
    const auto& ys = ev.diag_b.pairs;

    auto apply = [&](const PersistencePair& x, double g_birth, double g_death) {
      push_edge_gradient(ev.cloud_a, x.birth_edge, x.birth, outer * g_birth, point_grad);
      push_edge_gradient(ev.cloud_a, x.death_edge, x.death, outer * g_death, point_grad);
    };
    for (const auto& [i, j] : ev.matching.matched) {
      const auto& x = xs[i];
      const auto& y = ys[j];
      if (x.essential() && y.essential()) {
        const double d = x.birth - y.birth;
        if (d == 0.0) continue;
        apply(x, p * std::pow(std::abs(d), p - 1.0) * (d > 0 ? 1.0 : -1.0), 0.0);
        continue;
      }
      const double db = x.birth - y.birth;
      const double dd = x.death - y.death;
      const double dist = std::sqrt(db * db + dd * dd);
      if (dist == 0.0) {
        if (p < 2.0) out.ties.emplace_back("zero-distance match");
        continue;
      }
      const double coef = p * std::pow(dist, p - 2.0);
      apply(x, coef * db, coef * dd);
    }
    for (auto i : ev.matching.to_diagonal_1) {
      const auto& x = xs[i];
      const double q = diagonal_distance_l2(x);
      const double g = p * std::pow(q, p - 1.0) * (0.5 * std::numbers::sqrt2);
      apply(x, -g, g);
    }

    // Back through x = (u / |u|), u = patch - mean(patch).
    for (std::size_t idx = 0; idx < point_grad.size(); ++idx) {
      const PatchVector& g = point_grad[idx];
      if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) continue;
      const PatchOrigin o = ev.cloud_a.origins[idx];
      PatchVector u{};
      double mean = 0.0;
      for (int r = 0; r < kPatchSide; ++r) {
        for (int c = 0; c < kPatchSide; ++c) u[r * kPatchSide + c] = candidate.at(o.row + r, o.col + c);
      }
      for (double v : u) mean += v;
      mean /= kPatchDim;
      double norm2 = 0.0;
      for (double& v : u) {
        v -= mean;
        norm2 += v * v;
      }
      const double norm = std::sqrt(norm2);
      const PatchVector& x = ev.cloud_a.points[idx];
      double g_mean = 0.0;
      double x_dot_g = 0.0;
      for (int k = 0; k < kPatchDim; ++k) {
        g_mean += g[k];
        x_dot_g += x[k] * g[k];
      }
      g_mean /= kPatchDim;
      for (int r = 0; r < kPatchSide; ++r) {
        for (int c = 0; c < kPatchSide; ++c) {
          const int k = r * kPatchSide + c;
          out.gradient.at(o.row + r, o.col + c) += (g[k] - g_mean - x_dot_g * x[k]) / norm;
        }
      }
    }
    detect_pipeline_ties(candidate, cfg, out.ties);
    detect_edge_ties(ev.cloud_a, ev.diag_a, out.ties);
  }
  report.matching = std::move(ev.matching);
  out.tie_detected = !out.ties.empty();
  return out;
}

Subgradient l_comb_subgradient(const Raster& candidate, const Image& clean,
                               const LossConfig& cfg) {
  return l_comb_subgradient(candidate, to_unit_raster(clean), cfg);
}

}  // namespace topoloss
