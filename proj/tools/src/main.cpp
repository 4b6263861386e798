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

#include <glob.h>

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "digest.hpp"
#include "json.hpp"
#include "topoloss/diagram_distance.hpp"
#include "topoloss/error.hpp"
#include "topoloss/groundtruth.hpp"
#include "topoloss/metrics.hpp"
#include "topoloss/patch_space.hpp"
#include "topoloss/persistence.hpp"
#include "topoloss/pgm.hpp"
#include "topoloss/serialize.hpp"
#include "topoloss/topo_loss.hpp"

#ifndef TOPOLOSS_VERSION
#define TOPOLOSS_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace topoloss::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitMismatch = 4;

struct Output {
  std::string name;
  std::optional<fs::path> path;  // standard output when empty
  std::string bytes;
};

struct Run {
  std::string command;
  std::vector<std::string> argv;  // canonical, replayable
  json config = json::object();
  std::vector<fs::path> inputs;
  std::vector<std::string> input_hashes;
  std::vector<Output> outputs;
  std::vector<std::string> notes;  // human-readable lines for standard error
};

class InputSet {
 public:
  std::string load(const fs::path& path) {
    const fs::path abs = fs::absolute(path).lexically_normal();
    std::string bytes = read_file(abs);
    run_.inputs.push_back(abs);
    run_.input_hashes.push_back(sha256_hex(bytes));
    return bytes;
  }

  explicit InputSet(Run& run) : run_(run) {}

 private:
  Run& run_;
};

double parse_real(const std::string& text, const std::string& flag) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ArgumentError(flag + ": not a finite number: '" + text + "'");
  }
  return v;
}

std::string abs_string(const std::string& path) {
  return fs::absolute(path).lexically_normal().string();
}

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns, const std::string& flag) {
  std::vector<std::string> files;
  for (const auto& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
    }
    globfree(&g);
    if (rc == GLOB_NOMATCH) throw ArgumentError(flag + ": no files match '" + pattern + "'");
    if (rc != 0) throw IoError(flag + ": cannot expand '" + pattern + "'");
  }
  return files;
}

fs::path with_extension(const std::string& path, const std::string& ext) {
  fs::path p = fs::absolute(path).lexically_normal();
  p.replace_extension(ext);
  return p;
}

std::string join_dims(const std::vector<int>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(dims[i]);
  }
  return out;
}

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string manifest_out;
  CLI::Option* seed_opt = nullptr;
};

// Explicit --seed wins; otherwise the seed is a digest of the inputs, so the
// same files always give the same cloud.
std::uint64_t resolve_seed(const Globals& g, const Run& run) {
  if (g.seed_opt->count() > 0) return g.seed;
  if (run.input_hashes.size() == 1) return seed_from_digest(run.input_hashes.front());
  std::string joined;
  for (const auto& h : run.input_hashes) joined += h;
  return seed_from_digest(sha256_hex(joined));
}

std::vector<std::string> global_argv(const Globals& g, std::optional<std::uint64_t> seed) {
  std::vector<std::string> argv;
  if (seed) argv.insert(argv.end(), {"--seed", std::to_string(*seed)});
  argv.insert(argv.end(), {"--threads", std::to_string(g.threads)});
  return argv;
}

struct PatchFlags {
  std::string t = "0.2";
  std::string density = "0.5";
  int k = 30;
  int n = 300;
  int stride = 1;

  void add_to(CLI::App* app) {
    app->add_option("--t", t, "Fraction of patches kept by D-norm contrast")->capture_default_str();
    app->add_option("--density", density, "Fraction kept by k-density")->capture_default_str();
    app->add_option("--k", k, "Neighbour rank for the density estimate")->capture_default_str();
    app->add_option("--n", n, "Sample size")->capture_default_str();
    app->add_option("--stride", stride, "Patch extraction stride")->capture_default_str();
  }

  PatchSpaceConfig resolve(std::uint64_t seed) const {
    PatchSpaceConfig cfg;
    cfg.contrast_fraction = parse_real(t, "--t");
    cfg.density_fraction = parse_real(density, "--density");
    cfg.k = k;
    cfg.n = n;
    cfg.stride = stride;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
  }

  static std::vector<std::string> argv(const PatchSpaceConfig& cfg) {
    return {"--t",      format_real(cfg.contrast_fraction), "--density", format_real(cfg.density_fraction),
            "--k",      std::to_string(cfg.k),              "--n",       std::to_string(cfg.n),
            "--stride", std::to_string(cfg.stride)};
  }

  static json to_json(const PatchSpaceConfig& cfg) {
    return {{"t", cfg.contrast_fraction}, {"density_fraction", cfg.density_fraction},
            {"k", cfg.k},                 {"n", cfg.n},
            {"stride", cfg.stride},       {"seed", cfg.seed}};
  }
};

struct PatchesArgs {
  std::string image;
  PatchFlags flags;
  std::string out;
  std::string sidecar;
};

struct DiagramArgs {
  std::string cloud;
  int maxdim = 1;
  std::string max_radius;
  std::string out;
};

struct DistanceArgs {
  std::string first;
  std::string second;
  std::string p = "2";
  std::vector<int> dims{0, 1};
  bool strict = false;
  std::string out;
};

struct LossArgs {
  std::string noisy;
  std::string clean;
  std::string alpha = "0.93";
  std::string beta = "0.07";
  std::string base = "l1";
  std::string p = "2";
  std::vector<int> dims{0};
  bool strict = false;
  PatchFlags flags;
  std::string out;
};

struct GroundtruthArgs {
  std::vector<std::string> frames;
  std::vector<std::string> darks;
  std::string profile;
  std::string alpha_conf = "3.0902";
  std::string reject_fraction = "0.05";
  std::string align_tol = "1e-3";
  int align_max_iter = 100;
  bool no_register = false;
  std::string out;
  std::string report;
  std::string profile_out;
};

struct MetricsArgs {
  std::string reference;
  std::string test;
  std::string out;
};

struct ReplayArgs {
  std::string manifest;
  std::string out_dir;
};

Output primary_output(const std::string& name, const std::string& out, std::string bytes) {
  Output o{name, std::nullopt, std::move(bytes)};
  if (!out.empty()) o.path = fs::absolute(out).lexically_normal();
  return o;
}

void append_out(std::vector<std::string>& argv, const std::string& flag, const std::string& path) {
  if (!path.empty()) argv.insert(argv.end(), {flag, abs_string(path)});
}

Run run_patches(const Globals& g, const PatchesArgs& a) {
  Run run;
  run.command = "patches";
  InputSet in(run);
  const Image img = decode_pgm(in.load(a.image));
  const PatchSpaceConfig cfg = a.flags.resolve(resolve_seed(g, run));
  const PatchCloud cloud = build_patch_cloud(img, cfg, g.threads);

  run.outputs.push_back(primary_output("cloud", a.out, cloud_to_csv(cloud)));
  fs::path sidecar;
  if (!a.sidecar.empty()) {
    sidecar = fs::absolute(a.sidecar).lexically_normal();
  } else if (!a.out.empty()) {
    sidecar = with_extension(a.out, ".json");
  }
  if (!sidecar.empty()) run.outputs.push_back({"sidecar", sidecar, cloud_sidecar_json(cloud)});

  run.argv = global_argv(g, cfg.seed);
  run.argv.insert(run.argv.end(), {"patches", abs_string(a.image)});
  const auto pf = PatchFlags::argv(cfg);
  run.argv.insert(run.argv.end(), pf.begin(), pf.end());
  append_out(run.argv, "-o", a.out);
  if (!sidecar.empty()) run.argv.insert(run.argv.end(), {"--sidecar", sidecar.string()});
  run.config = PatchFlags::to_json(cfg);
  run.config["threads"] = g.threads;
  if (cloud.dropped_degenerate > 0) {
    run.notes.push_back("dropped " + std::to_string(cloud.dropped_degenerate) + " zero-norm patches");
  }
  return run;
}

Run run_diagram(const Globals& g, const DiagramArgs& a) {
  Run run;
  run.command = "diagram";
  InputSet in(run);
  const PointCloud cloud = cloud_from_csv(in.load(a.cloud));
  FiltrationSpec spec;
  spec.max_dimension = a.maxdim;
  if (!a.max_radius.empty()) spec.max_radius = parse_real(a.max_radius, "--max-radius");
  spec.validate();
  run.outputs.push_back(primary_output("diagram", a.out, diagram_to_csv(vr_diagram(cloud, spec))));

  run.argv = global_argv(g, std::nullopt);
  run.argv.insert(run.argv.end(), {"diagram", abs_string(a.cloud), "--maxdim", std::to_string(a.maxdim)});
  if (spec.max_radius) run.argv.insert(run.argv.end(), {"--max-radius", format_real(*spec.max_radius)});
  append_out(run.argv, "-o", a.out);
  run.config = {{"max_dimension", spec.max_dimension},
                {"max_radius", spec.max_radius ? json(*spec.max_radius) : json(nullptr)}};
  return run;
}

Run run_distance(const Globals& g, const DistanceArgs& a) {
  Run run;
  run.command = "distance";
  InputSet in(run);
  const PersistenceDiagram d1 = diagram_from_csv(in.load(a.first));
  const PersistenceDiagram d2 = diagram_from_csv(in.load(a.second));
  const double p = parse_real(a.p, "--p");
  const EssentialMode mode = a.strict ? EssentialMode::kStrict : EssentialMode::kExclude;
  const DiagramMatching m = wasserstein(d1, d2, p, a.dims, mode);
  const double b = bottleneck(d1, d2, a.dims, mode);
  run.outputs.push_back(primary_output("matching", a.out, matching_to_json(m)));
  run.notes.push_back("W_" + format_real(p) + " = " + format_real(m.cost) + "  bottleneck = " + format_real(b));

  run.argv = global_argv(g, std::nullopt);
  run.argv.insert(run.argv.end(), {"distance", abs_string(a.first), abs_string(a.second), "--p", format_real(p),
                                   "--dims", join_dims(a.dims)});
  if (a.strict) run.argv.push_back("--strict");
  append_out(run.argv, "-o", a.out);
  run.config = {{"p", p}, {"dims", a.dims}, {"essential", a.strict ? "strict" : "exclude"}};
  return run;
}

Run run_loss(const Globals& g, const LossArgs& a) {
  Run run;
  run.command = "loss";
  InputSet in(run);
  const Image noisy = decode_pgm(in.load(a.noisy));
  const Image clean = decode_pgm(in.load(a.clean));
  LossConfig cfg;
  cfg.alpha = parse_real(a.alpha, "--alpha");
  cfg.beta = parse_real(a.beta, "--beta");
  cfg.base = a.base == "l2" ? BaseLoss::kL2 : BaseLoss::kL1;
  cfg.p = parse_real(a.p, "--p");
  cfg.dims = a.dims;
  cfg.essential = a.strict ? EssentialMode::kStrict : EssentialMode::kExclude;
  cfg.patch = a.flags.resolve(resolve_seed(g, run));
  cfg.threads = g.threads;
  cfg.validate();
  const LossReport report = l_comb(noisy, clean, cfg);
  run.outputs.push_back(primary_output("report", a.out, loss_report_to_json(report, cfg)));

  run.argv = global_argv(g, cfg.patch.seed);
  run.argv.insert(run.argv.end(), {"loss", abs_string(a.noisy), abs_string(a.clean), "--alpha", format_real(cfg.alpha),
                                   "--beta", format_real(cfg.beta), "--base", a.base, "--p", format_real(cfg.p),
                                   "--dims", join_dims(cfg.dims)});
  if (a.strict) run.argv.push_back("--strict");
  const auto pf = PatchFlags::argv(cfg.patch);
  run.argv.insert(run.argv.end(), pf.begin(), pf.end());
  append_out(run.argv, "-o", a.out);
  run.config = {{"alpha", cfg.alpha}, {"beta", cfg.beta}, {"base", a.base},   {"p", cfg.p},
                {"dims", cfg.dims},   {"essential", a.strict ? "strict" : "exclude"},
                {"patch", PatchFlags::to_json(cfg.patch)},                    {"threads", g.threads}};
  return run;
}

Run run_groundtruth(const Globals& g, const GroundtruthArgs& a) {
  Run run;
  run.command = "groundtruth";
  InputSet in(run);
  if (!a.profile.empty() && !a.darks.empty()) throw ArgumentError("--darks and --profile are exclusive");

  const auto frame_files = expand_globs(a.frames, "--frames");
  FrameStack stack;
  for (const auto& f : frame_files) stack.frames.push_back(decode_pgm(in.load(f)));
  stack.validate();
  if (stack.frames.size() < 2) throw ArgumentError("--frames: at least 2 frames are required");

  const double alpha_conf = parse_real(a.alpha_conf, "--alpha-conf");
  const auto dark_files = a.darks.empty() ? std::vector<std::string>{} : expand_globs(a.darks, "--darks");
  CalibrationProfile profile;
  std::string source = "none";
  if (!dark_files.empty()) {
    FrameStack darks;
    for (const auto& f : dark_files) darks.frames.push_back(decode_pgm(in.load(f)));
    profile = calibrate_hot_pixels(darks, alpha_conf);
    source = "darks";
  } else if (!a.profile.empty()) {
    profile = profile_from_json(in.load(a.profile));
    source = "profile";
  } else {
    profile = CalibrationProfile::empty(stack.frames.front().width(), stack.frames.front().height());
  }
  if (profile.above_warn_fraction()) {
    run.notes.push_back("warning: " + format_real(100.0 * profile.masked_fraction()) +
                        "% of pixels flagged hot, above the expected fraction");
  }

  GroundtruthOptions opts;
  opts.align_tol = parse_real(a.align_tol, "--align-tol");
  opts.align_max_iter = a.align_max_iter;
  opts.reject_fraction = parse_real(a.reject_fraction, "--reject-fraction");
  opts.register_frames = !a.no_register;
  opts.threads = g.threads;
  const GroundtruthResult result = estimate_groundtruth(stack, profile, opts);

  json report = json::parse(groundtruth_report_to_json(result.report));
  report["calibration"] = {{"source", source},
                           {"mu", profile.mu},
                           {"sigma", profile.sigma},
                           {"alpha_conf", profile.alpha_conf},
                           {"masked", profile.masked_count()},
                           {"masked_fraction", profile.masked_fraction()},
                           {"warn", profile.above_warn_fraction()}};
  for (const auto& f : result.report.frames) {
    if (f.rejected_intensity) run.notes.push_back("frame " + std::to_string(f.index) + " rejected by intensity");
    if (f.rejected_registration) {
      run.notes.push_back("warning: frame " + std::to_string(f.index) + " excluded (registration did not improve NCC)");
    }
  }

  const fs::path report_path =
      a.report.empty() ? with_extension(a.out, ".report.json") : fs::absolute(a.report).lexically_normal();
  run.outputs.push_back(primary_output("image", a.out, encode_pgm(result.image)));
  run.outputs.push_back({"report", report_path, report.dump(2) + "\n"});
  if (!a.profile_out.empty()) {
    run.outputs.push_back({"profile", fs::absolute(a.profile_out).lexically_normal(), profile_to_json(profile)});
  }

  run.argv = global_argv(g, std::nullopt);
  run.argv.push_back("groundtruth");
  run.argv.push_back("--frames");
  for (const auto& f : frame_files) run.argv.push_back(abs_string(f));
  if (!dark_files.empty()) {
    run.argv.push_back("--darks");
    for (const auto& f : dark_files) run.argv.push_back(abs_string(f));
  }
  append_out(run.argv, "--profile", a.profile);
  run.argv.insert(run.argv.end(), {"--alpha-conf", format_real(alpha_conf), "--reject-fraction",
                                   format_real(opts.reject_fraction), "--align-tol", format_real(opts.align_tol),
                                   "--align-max-iter", std::to_string(opts.align_max_iter)});
  if (a.no_register) run.argv.push_back("--no-register");
  append_out(run.argv, "-o", a.out);
  run.argv.insert(run.argv.end(), {"--report", report_path.string()});
  append_out(run.argv, "--profile-out", a.profile_out);
  run.config = {{"alpha_conf", alpha_conf},
                {"calibration", source},
                {"reject_fraction", opts.reject_fraction},
                {"align_tol", opts.align_tol},
                {"align_max_iter", opts.align_max_iter},
                {"register", opts.register_frames},
                {"frames", frame_files.size()},
                {"threads", g.threads}};
  return run;
}

Run run_metrics(const Globals& g, const MetricsArgs& a) {
  Run run;
  run.command = "metrics";
  InputSet in(run);
  const Image reference = decode_pgm(in.load(a.reference));
  const Image test = decode_pgm(in.load(a.test));
  run.outputs.push_back(primary_output("report", a.out, quality_report_to_json(quality(reference, test))));
  run.argv = global_argv(g, std::nullopt);
  run.argv.insert(run.argv.end(), {"metrics", abs_string(a.reference), abs_string(a.test)});
  append_out(run.argv, "-o", a.out);
  const SsimOptions ssim;
  run.config = {{"ssim_window", ssim.window}, {"ssim_sigma", ssim.sigma}, {"k1", ssim.k1}, {"k2", ssim.k2}};
  return run;
}

// Owns the parser and every option target, so a fresh instance can parse a
// recorded argv during replay.
struct Cli {
  CLI::App app{"Topological loss, persistence and pseudo-groundtruth tools", "topoloss"};
  Globals g;
  PatchesArgs patches;
  DiagramArgs diagram;
  DistanceArgs distance;
  LossArgs loss;
  GroundtruthArgs groundtruth;
  MetricsArgs metrics;
  ReplayArgs replay;
  CLI::App* sub_patches = nullptr;
  CLI::App* sub_diagram = nullptr;
  CLI::App* sub_distance = nullptr;
  CLI::App* sub_loss = nullptr;
  CLI::App* sub_groundtruth = nullptr;
  CLI::App* sub_metrics = nullptr;
  CLI::App* sub_replay = nullptr;

  Cli() {
    app.set_version_flag("--version", TOPOLOSS_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    g.seed_opt = app.add_option("--seed", g.seed, "RNG seed (derived from the inputs when omitted)");
    app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--manifest-out", g.manifest_out, "Where to write the run manifest");

    sub_patches = app.add_subcommand("patches", "Build a patch-space point cloud from an image");
    sub_patches->add_option("image", patches.image, "Input PGM")->required();
    patches.flags.add_to(sub_patches);
    sub_patches->add_option("-o,--out", patches.out, "Cloud CSV (standard output when omitted)");
    sub_patches->add_option("--sidecar", patches.sidecar, "Sidecar JSON (defaults next to --out)");

    sub_diagram = app.add_subcommand("diagram", "Vietoris-Rips persistence diagram of a cloud CSV");
    sub_diagram->add_option("cloud", diagram.cloud, "Cloud CSV")->required();
    sub_diagram->add_option("--maxdim", diagram.maxdim, "Highest homology dimension")
        ->check(CLI::Range(0, 1))
        ->capture_default_str();
    sub_diagram->add_option("--max-radius", diagram.max_radius, "Filtration cutoff (enclosing radius when omitted)");
    sub_diagram->add_option("-o,--out", diagram.out, "Diagram CSV");

    sub_distance = app.add_subcommand("distance", "p-Wasserstein matching between two diagrams");
    sub_distance->add_option("first", distance.first, "Diagram CSV")->required();
    sub_distance->add_option("second", distance.second, "Diagram CSV")->required();
    sub_distance->add_option("--p", distance.p, "Wasserstein exponent")->capture_default_str();
    sub_distance->add_option("--dims", distance.dims, "Homology dimensions")->delimiter(',')->capture_default_str();
    sub_distance->add_flag("--strict", distance.strict, "Match essential classes instead of dropping them");
    sub_distance->add_option("-o,--out", distance.out, "Matching JSON");

    sub_loss = app.add_subcommand("loss", "Combined topological and pixel loss between two images");
    sub_loss->add_option("noisy", loss.noisy, "Candidate PGM")->required();
    sub_loss->add_option("clean", loss.clean, "Reference PGM")->required();
    sub_loss->add_option("--alpha", loss.alpha, "Weight of the topological term")->capture_default_str();
    sub_loss->add_option("--beta", loss.beta, "Weight of the pixel term")->capture_default_str();
    sub_loss->add_option("--base", loss.base, "Pixel loss")->check(CLI::IsMember({"l1", "l2"}))->capture_default_str();
    sub_loss->add_option("--p", loss.p, "Wasserstein exponent")->capture_default_str();
    sub_loss->add_option("--dims", loss.dims, "Homology dimensions")->delimiter(',')->capture_default_str();
    sub_loss->add_flag("--strict", loss.strict, "Match essential classes instead of dropping them");
    loss.flags.add_to(sub_loss);
    sub_loss->add_option("-o,--out", loss.out, "LossReport JSON");

    sub_groundtruth = app.add_subcommand("groundtruth", "Estimate a pseudo-groundtruth from a stack of frames");
    sub_groundtruth->add_option("--frames", groundtruth.frames, "Frame files or glob patterns")->required();
    sub_groundtruth->add_option("--darks", groundtruth.darks, "Dark frame files or glob patterns");
    sub_groundtruth->add_option("--profile", groundtruth.profile, "Calibration profile JSON instead of --darks");
    sub_groundtruth->add_option("--alpha-conf", groundtruth.alpha_conf, "Hot pixel threshold in sigmas")
        ->capture_default_str();
    sub_groundtruth->add_option("--reject-fraction", groundtruth.reject_fraction,
                                "Relative deviation from the median frame mean that rejects a frame")
        ->capture_default_str();
    sub_groundtruth->add_option("--align-tol", groundtruth.align_tol, "Intensity alignment tolerance")
        ->capture_default_str();
    sub_groundtruth->add_option("--align-max-iter", groundtruth.align_max_iter, "Intensity alignment iterations")
        ->capture_default_str();
    sub_groundtruth->add_flag("--no-register", groundtruth.no_register, "Skip rigid registration");
    sub_groundtruth->add_option("-o,--out", groundtruth.out, "Output PGM")->required();
    sub_groundtruth->add_option("--report", groundtruth.report, "Stage report JSON (defaults next to --out)");
    sub_groundtruth->add_option("--profile-out", groundtruth.profile_out, "Write the calibration profile");

    sub_metrics = app.add_subcommand("metrics", "PSNR and SSIM between two images");
    sub_metrics->add_option("reference", metrics.reference, "Reference PGM")->required();
    sub_metrics->add_option("test", metrics.test, "Test PGM")->required();
    sub_metrics->add_option("-o,--out", metrics.out, "QualityReport JSON");

    sub_replay = app.add_subcommand("replay", "Re-run a manifest and verify its outputs byte for byte");
    sub_replay->add_option("manifest", replay.manifest, "Run manifest JSON")->required();
    sub_replay->add_option("--out-dir", replay.out_dir, "Also write the regenerated outputs here");
  }

  Run execute() const {
    if (sub_patches->parsed()) return run_patches(g, patches);
    if (sub_diagram->parsed()) return run_diagram(g, diagram);
    if (sub_distance->parsed()) return run_distance(g, distance);
    if (sub_loss->parsed()) return run_loss(g, loss);
    if (sub_groundtruth->parsed()) return run_groundtruth(g, groundtruth);
    if (sub_metrics->parsed()) return run_metrics(g, metrics);
    throw ArgumentError("no command given");
  }
};

json manifest_of(const Run& run) {
  json inputs = json::array();
  for (std::size_t i = 0; i < run.inputs.size(); ++i) {
    inputs.push_back({{"path", run.inputs[i].string()}, {"sha256", run.input_hashes[i]}});
  }
  json outputs = json::array();
  for (const auto& o : run.outputs) {
    outputs.push_back({{"name", o.name},
                       {"path", o.path ? json(o.path->string()) : json(nullptr)},
                       {"sha256", sha256_hex(o.bytes)}});
  }
  return {{"tool_version", TOPOLOSS_VERSION}, {"command", run.command}, {"argv", run.argv},
          {"config", run.config},             {"input_hashes", inputs},  {"output_hashes", outputs}};
}

fs::path manifest_path(const Globals& g, const Run& run) {
  if (!g.manifest_out.empty()) return fs::absolute(g.manifest_out).lexically_normal();
  for (const auto& o : run.outputs) {
    if (o.path) return fs::path(o.path->string() + ".manifest.json");
  }
  return fs::absolute("topoloss-" + run.command + ".manifest.json");
}

void emit(const Run& run, const Globals& g) {
  const bool json_on_stdout =
      std::any_of(run.outputs.begin(), run.outputs.end(), [](const Output& o) { return !o.path; });
  for (const auto& o : run.outputs) {
    if (o.path) {
      write_file(*o.path, o.bytes);
    } else {
      std::cout << o.bytes << std::flush;
    }
  }
  for (const auto& note : run.notes) {
    // The distance summary is the command's human-readable result.
    if (run.command == "distance" && !json_on_stdout && note.rfind("W_", 0) == 0) {
      std::cout << note << '\n';
    } else {
      std::cerr << note << '\n';
    }
  }
  write_file(manifest_path(g, run), manifest_of(run).dump(2) + "\n");
}

int replay_manifest(const ReplayArgs& args) {
  json manifest;
  try {
    manifest = json::parse(read_file(args.manifest));
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid manifest: ") + e.what());
  }
  if (manifest.value("tool_version", "") != TOPOLOSS_VERSION) {
    std::cerr << "warning: manifest written by version " << manifest.value("tool_version", "?") << '\n';
  }
  std::vector<std::string> argv;
  json recorded_outputs;
  try {
    argv = manifest.at("argv").get<std::vector<std::string>>();
    recorded_outputs = manifest.at("output_hashes");
    for (const auto& input : manifest.at("input_hashes")) {
      const auto path = input.at("path").get<std::string>();
      if (sha256_hex(read_file(path)) != input.at("sha256").get<std::string>()) {
        throw MismatchError("input '" + path + "' changed since the manifest was written");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid manifest: ") + e.what());
  }

  Cli cli;
  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  try {
    cli.app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw FormatError(std::string("manifest argv does not parse: ") + e.what());
  }
  if (cli.sub_replay->parsed()) throw FormatError("manifest cannot replay another manifest");
  const Run run = cli.execute();

  int mismatches = 0;
  for (const auto& recorded : recorded_outputs) {
    const auto name = recorded.at("name").get<std::string>();
    const auto it = std::find_if(run.outputs.begin(), run.outputs.end(), [&](const Output& o) { return o.name == name; });
    if (it == run.outputs.end()) {
      std::cerr << "replay: output '" << name << "' was not produced\n";
      ++mismatches;
      continue;
    }
    const bool same = sha256_hex(it->bytes) == recorded.at("sha256").get<std::string>();
    std::cout << "replay: " << name << (same ? " identical" : " DIFFERS") << '\n';
    if (!same) ++mismatches;
    if (!args.out_dir.empty()) {
      const fs::path dir(args.out_dir);
      fs::create_directories(dir);
      const fs::path file = it->path ? dir / it->path->filename() : dir / (name + ".stdout");
      write_file(file, it->bytes);
    }
  }
  if (run.outputs.size() != recorded_outputs.size()) ++mismatches;
  return mismatches == 0 ? kExitOk : kExitFailure;
}

int main_impl(int argc, char** argv) {
  Cli cli;
  try {
    cli.app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (cli.sub_replay->parsed()) return replay_manifest(cli.replay);
    const Run run = cli.execute();
    emit(run, cli.g);
    return kExitOk;
  } catch (const DegenerateInputError& e) {
    std::cerr << "topoloss: degenerate input: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const ConvergenceError& e) {
    std::cerr << "topoloss: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const MismatchError& e) {
    std::cerr << "topoloss: mismatch: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const ArgumentError& e) {
    std::cerr << "topoloss: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "topoloss: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "topoloss: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace
}  // namespace topoloss::cli

int main(int argc, char** argv) { return topoloss::cli::main_impl(argc, argv); }
