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

#include "topoloss/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "json.hpp"
#include "topoloss/error.hpp"

namespace topoloss {
namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double parse_real(std::string_view field, std::size_t line) {
  const std::string s(trim(field));
  if (s == "inf" || s == "+inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || std::isnan(v)) {
    throw FormatError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string cloud_to_csv(const PatchCloud& cloud) {
  std::string out = "v0,v1,v2,v3,v4,v5,v6,v7,v8\n";
  for (const auto& p : cloud.points) {
    for (int i = 0; i < kPatchDim; ++i) {
      if (i) out += ',';
      out += format_real(p[i]);
    }
    out += '\n';
  }
  return out;
}

PointCloud cloud_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw FormatError("cloud CSV is empty");
  const auto header = split(lines[0], ',');
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) != "v" + std::to_string(i)) {
      throw FormatError("cloud CSV header must be v0..v{d-1}");
    }
  }
  const std::size_t dim = header.size();
  std::vector<double> coords;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split(lines[l], ',');
    if (fields.size() != dim) {
      throw FormatError("line " + std::to_string(l + 1) + ": expected " + std::to_string(dim) +
                        " columns, found " + std::to_string(fields.size()));
    }
    for (auto f : fields) {
      const double v = parse_real(f, l + 1);
      if (!std::isfinite(v)) throw FormatError("line " + std::to_string(l + 1) + ": non-finite coordinate");
      coords.push_back(v);
    }
  }
  return PointCloud(dim, std::move(coords));
}

std::string cloud_sidecar_json(const PatchCloud& cloud) {
  const auto& c = cloud.config;
  json j = {{"t", c.contrast_fraction}, {"density_fraction", c.density_fraction},
            {"k", c.k},                 {"n", c.n},
            {"stride", c.stride},       {"seed", c.seed},
            {"dropped_degenerate", cloud.dropped_degenerate}, {"points", cloud.size()}};
  return j.dump(2) + "\n";
}

std::string diagram_to_csv(const PersistenceDiagram& diagram) {
  PersistenceDiagram sorted = diagram;
  canonicalize(sorted);
  std::string out = "dim,birth,death\n";
  for (const auto& p : sorted.pairs) {
    out += std::to_string(p.dim) + "," + format_real(p.birth) + "," + format_real(p.death) + "\n";
  }
  return out;
}

PersistenceDiagram diagram_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "dim,birth,death") {
    throw FormatError("diagram CSV must start with the header dim,birth,death");
  }
  PersistenceDiagram d;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split(lines[l], ',');
    if (fields.size() != 3) {
      throw FormatError("line " + std::to_string(l + 1) + ": expected 3 columns");
    }
    const double dim = parse_real(fields[0], l + 1);
    if (dim != 0.0 && dim != 1.0) throw FormatError("line " + std::to_string(l + 1) + ": dim must be 0 or 1");
    PersistencePair p;
    p.dim = static_cast<int>(dim);
    p.birth = parse_real(fields[1], l + 1);
    p.death = parse_real(fields[2], l + 1);
    if (!std::isfinite(p.birth) || !(p.death > p.birth)) {
      throw FormatError("line " + std::to_string(l + 1) + ": need finite birth < death");
    }
    d.pairs.push_back(p);
  }
  canonicalize(d);
  return d;
}

std::string matching_to_json(const DiagramMatching& m) {
  json matched = json::array();
  for (const auto& [i, j] : m.matched) matched.push_back({i, j});
  json j = {{"p", m.p},
            {"cost", m.cost},
            {"matched", matched},
            {"diag1", m.to_diagonal_1},
            {"diag2", m.to_diagonal_2}};
  return j.dump() + "\n";
}

std::string loss_report_to_json(const LossReport& r, const LossConfig& cfg) {
  json j = {{"l_top", r.l_top},
            {"l_base", r.l_base},
            {"l_comb", r.l_comb},
            {"alpha", cfg.alpha},
            {"beta", cfg.beta},
            {"base", cfg.base == BaseLoss::kL1 ? "l1" : "l2"},
            {"p", cfg.p},
            {"dims", cfg.dims},
            {"seed", cfg.patch.seed},
            {"cloud_sizes", {r.cloud_sizes.first, r.cloud_sizes.second}}};
  return j.dump() + "\n";
}

std::string quality_report_to_json(const QualityReport& r) {
  json j;
  j["psnr"] = r.psnr.is_infinite() ? json("inf") : json(r.psnr.decibels());
  j["ssim"] = r.ssim;
  return j.dump() + "\n";
}

std::string profile_to_json(const CalibrationProfile& p) {
  std::vector<std::size_t> runs;
  std::uint8_t state = 0;
  std::size_t run = 0;
  for (auto m : p.hot_mask) {
    const std::uint8_t bit = m ? 1 : 0;
    if (bit != state) {
      runs.push_back(run);
      state = bit;
      run = 0;
    }
    ++run;
  }
  runs.push_back(run);
  json j = {{"mu", p.mu},
            {"sigma", p.sigma},
            {"alpha_conf", p.alpha_conf},
            {"width", p.width},
            {"height", p.height},
            {"masked", p.masked_count()},
            {"masked_fraction", p.masked_fraction()},
            {"mask_rle", runs}};
  return j.dump() + "\n";
}

CalibrationProfile profile_from_json(std::string_view text) {
  CalibrationProfile p;
  try {
    const json j = json::parse(text);
    p.mu = j.at("mu").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.alpha_conf = j.at("alpha_conf").get<double>();
    p.width = j.at("width").get<int>();
    p.height = j.at("height").get<int>();
    if (p.width <= 0 || p.height <= 0) throw FormatError("profile dimensions must be positive");
    const std::size_t total = static_cast<std::size_t>(p.width) * p.height;
    std::uint8_t state = 0;
    for (const auto& r : j.at("mask_rle")) {
      const auto len = r.get<std::size_t>();
      if (p.hot_mask.size() + len > total) throw FormatError("mask runs exceed width x height");
      p.hot_mask.insert(p.hot_mask.end(), len, state);
      state ^= 1;
    }
    if (p.hot_mask.size() != total) throw FormatError("mask runs do not cover width x height");
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid calibration profile: ") + e.what());
  }
  return p;
}

std::string groundtruth_report_to_json(const GroundtruthReport& r) {
  json frames = json::array();
  for (const auto& f : r.frames) {
    frames.push_back({{"index", f.index},
                      {"hot_replaced", f.hot_replaced},
                      {"hot_fallbacks", f.hot_fallbacks},
                      {"raw_mean", f.raw_mean},
                      {"rejected_intensity", f.rejected_intensity},
                      {"shift", f.shift},
                      {"transform", {{"tx", f.transform.tx}, {"ty", f.transform.ty}, {"theta", f.transform.theta}}},
                      {"ncc", f.ncc},
                      {"rejected_registration", f.rejected_registration}});
  }
  json j = {{"stages",
             {{"inpaint", {{"replaced", [&] {
                              std::size_t s = 0;
                              for (const auto& f : r.frames) s += f.hot_replaced;
                              return s;
                            }()}}},
              {"align_intensity",
               {{"median_mean", r.median_mean},
                {"common_mean", r.common_mean},
                {"iterations", r.align_iterations},
                {"residual", r.align_residual}}},
              {"average", {{"frames", r.averaged}}}}},
            {"frames", frames}};
  return j.dump(2) + "\n";
}

}  // namespace topoloss
