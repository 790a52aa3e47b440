#ifndef ANGEMB_TOOLS_CLI_APP_HPP
#define ANGEMB_TOOLS_CLI_APP_HPP

// Command-line front end. Kept header-only so tests can drive it in-process.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "angemb/angemb.hpp"

namespace angemb::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidThreshold: return kUsage;
    case ErrorCode::InvalidRank:
    case ErrorCode::RankDeficient:
    case ErrorCode::SingularStep: return kNumeric;
    default: return kData;
  }
}

/// Every flag of every command, resolved. Unused fields keep their defaults.
struct RunConfig {
  std::string command;
  std::string method = "ae";
  Index d = 1;
  double eta_theta = kDefaultEtaTheta;
  std::string strategy = "auto";
  std::uint64_t seed = 0;
  Index block = kDefaultBlock;
  unsigned threads = 0;
  std::string input;
  std::string frames;
  std::string model;
  std::string output;
  std::string reference;
  std::string preset;
  Index repeats = 3;
  std::vector<std::string> methods{"pca", "ae", "tae"};
  std::vector<std::string> shapes;
  // synth --preset custom
  Index dim = 10;
  Index rank = 1;
  Index n_inliers = 500;
  double fraction = 0.1;
  double magnitude = 10.0;
  double noise = 1e-3;
  std::string mode = "orthogonal";

  FitOptions fit_options() const {
    FitOptions o;
    o.method = parse_method(method);
    o.eta_theta = eta_theta;
    o.strategy = parse_strategy(strategy);
    o.seed = seed;
    o.block = block;
    o.threads = threads;
    return o;
  }
};

inline Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["method"] = c.method;
  j["d"] = c.d;
  j["eta_theta"] = c.eta_theta;
  j["strategy"] = c.strategy;
  j["seed"] = c.seed;
  j["block"] = c.block;
  j["threads"] = c.threads;
  if (!c.input.empty()) j["input"] = c.input;
  if (!c.frames.empty()) j["frames"] = c.frames;
  if (!c.model.empty()) j["model"] = c.model;
  if (!c.output.empty()) j["output"] = c.output;
  if (!c.reference.empty()) j["reference"] = c.reference;
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (c.command == "bench") {
    j["repeats"] = c.repeats;
    j["methods"] = c.methods;
    j["shapes"] = c.shapes;
  }
  return j;
}

inline unsigned threads_from_env() {
  const char* v = std::getenv("ANGEMB_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  try {
    return static_cast<unsigned>(std::stoul(v));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidData, "ANGEMB_THREADS must be a non-negative integer");
  }
}

// ---- commands ----------------------------------------------------------------

inline Json fit_summary(const FitModel& model, Index n, const RunConfig& cfg) {
  Json j;
  j["method"] = std::string(to_string(model.method));
  j["d"] = model.d();
  j["n"] = n;
  j["D"] = model.D();
  j["samples_trimmed"] = model.fit_stats.trimmed;
  j["strategy_used"] = std::string(to_string(model.fit_stats.strategy_used));
  j["wall_time_s"] = model.fit_stats.wall_time_s;
  j["config"] = config_json(cfg);
  return j;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const DataMatrix x = read_csv(cfg.input);
  const FitModel model = fit(x, cfg.d, cfg.fit_options());
  write_json(cfg.output, to_json(model));
  out << fit_summary(model, x.n(), cfg).dump() << "\n";
  return kOk;
}

inline int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
  const FitModel model = read_model(cfg.model);
  const DataMatrix x = read_csv(cfg.input);
  const DataMatrix rec = reconstruct(model, x);
  write_csv(cfg.output, rec.values);
  Json j;
  j["method"] = std::string(to_string(model.method));
  j["d"] = model.d();
  j["n"] = x.n();
  j["D"] = x.D();
  j["rmse"] = std::sqrt((rec.values - x.values).squaredNorm() / static_cast<double>(x.values.size()));
  j["config"] = config_json(cfg);
  out << j.dump() << "\n";
  return kOk;
}

inline Json trim_report_json(const DataMatrix& x, const RunConfig& cfg) {
  auto [mean, centered] = center(x);
  const SphereData sphere = normalize_columns(centered);
  const auto tau = outlier_counts(sphere, cfg.eta_theta, cfg.block, cfg.threads);
  const Selection sel = select_inliers(sphere, tau, cfg.eta_theta, cfg.block);
  Json j = to_json(sel.report);
  j["dropped_zero_norm"] = to_json(sphere.dropped);
  j["config"] = config_json(cfg);
  return j;
}

inline int cmd_trim_report(const RunConfig& cfg, std::ostream& out) {
  const Json j = trim_report_json(read_csv(cfg.input), cfg);
  if (!cfg.output.empty()) write_json(cfg.output, j);
  out << j.dump() << "\n";
  return kOk;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  namespace fs = std::filesystem;
  Json summary;
  summary["config"] = config_json(cfg);
  if (cfg.preset == "moving-square") {
    const SyntheticVideo v = moving_square_video(cfg.seed);
    const fs::path dir(cfg.output);
    write_frames(v.video, dir / "frames");
    FrameStack bg;
    bg.width = v.video.width;
    bg.height = v.video.height;
    bg.frames = v.background;
    bg.names = {"background"};
    write_frames(bg, dir);
    summary["intruded"] = to_json(v.intruded);
    write_json(dir / "truth.json", summary);
  } else if (cfg.preset == "faces") {
    FrameStack faces = synthetic_faces(cfg.seed);
    // dark band across the first face
    for (Index r = faces.height / 3; r < faces.height / 3 + 5; ++r) {
      for (Index c = 0; c < faces.width; ++c) faces.frames(r * faces.width + c, 0) *= 0.3;
    }
    const fs::path dir(cfg.output);
    write_frames(faces, dir / "frames");
    summary["shadowed"] = Json::array({faces.names.front()});
    write_json(dir / "truth.json", summary);
  } else {
    SynthResult res;
    if (cfg.preset == "canonical") {
      SynthSpec spec = canonical_robustness_spec();
      res = generate(spec);
    } else if (cfg.preset == "four-class-3d") {
      res = four_class_3d(cfg.seed);
    } else {
      SynthSpec spec;
      spec.D = cfg.dim;
      spec.n_inliers = cfg.n_inliers;
      spec.true_basis = random_orthonormal_basis(cfg.dim, cfg.rank, cfg.seed);
      spec.inlier_noise = cfg.noise;
      spec.outlier_fraction = cfg.fraction;
      spec.outlier_magnitude = cfg.magnitude;
      spec.outlier_direction_mode = cfg.mode == "random" ? OutlierMode::Random : OutlierMode::Orthogonal;
      spec.seed = cfg.seed;
      res = generate(spec);
    }
    write_csv(cfg.output, res.data.values);
    summary["outlier_indices"] = to_json(res.outlier_indices);
    summary["true_basis"] = columns_to_json(res.true_basis.basis);
    if (!res.labels.empty()) summary["labels"] = res.labels;
    write_json(sidecar_path(cfg.output), summary);
  }
  out << summary.dump() << "\n";
  return kOk;
}

inline Json pipeline_summary(const FitModel& model, const RunConfig& cfg) {
  Json j;
  j["method"] = std::string(to_string(model.method));
  j["d"] = model.d();
  j["eta_theta"] = cfg.eta_theta;
  if (model.trim) j["trim"] = to_json(*model.trim);
  return j;
}

inline int cmd_bgmodel(const RunConfig& cfg, std::ostream& out) {
  const FrameStack stack = load_frames(expand_frame_inputs(cfg.frames));
  const BackgroundResult res = background_model(stack, cfg.d, cfg.fit_options());
  write_frames(res.backgrounds, cfg.output, "_bg");
  write_frames(res.foreground, cfg.output, "_fg");
  Json j = pipeline_summary(res.model, cfg);
  if (!cfg.reference.empty()) {
    const FrameStack ref = load_frames({cfg.reference});
    if (ref.pixels() != stack.pixels()) throw Error(ErrorCode::MixedDimensions, "reference size differs");
    j["rmse"] = rmse_against(res.backgrounds.frames, ref.frames.col(0));
  }
  j["config"] = config_json(cfg);
  write_json(std::filesystem::path(cfg.output) / "summary.json", j);
  out << j.dump() << "\n";
  return kOk;
}

inline int cmd_faces(const RunConfig& cfg, std::ostream& out) {
  const FrameStack stack = load_frames(expand_frame_inputs(cfg.frames));
  const ShadowResult res = shadow_removal(stack, cfg.d, cfg.fit_options());
  write_frames(res.reconstructed, cfg.output, "_bg");
  write_frames(res.inverted_difference, cfg.output, "_diff");
  Json j = pipeline_summary(res.model, cfg);
  j["config"] = config_json(cfg);
  write_json(std::filesystem::path(cfg.output) / "summary.json", j);
  out << j.dump() << "\n";
  return kOk;
}

struct BenchShape {
  std::string name;
  Index D = 0;
  Index n = 0;
};

inline BenchShape parse_shape(const std::string& s) {
  static const std::map<std::string, BenchShape> presets = {
      {"small", {"small", 100, 100}},
      {"yale", {"yale", 32256, 64}},
      {"water", {"water", 20480, 633}},
      {"airport", {"airport", 25344, 3584}},
  };
  if (auto it = presets.find(s); it != presets.end()) return it->second;
  const auto x = s.find('x');
  try {
    if (x != std::string::npos) {
      std::size_t used = 0;
      const long D = std::stol(s.substr(0, x), &used);
      const long n = std::stol(s.substr(x + 1));
      if (D > 0 && n > 0) return {s, D, n};
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidData, "unknown bench shape '" + s + "' (preset name or DxN)");
}

/// Low-rank-plus-noise matrix standing in for a D x n frame stack.
inline DataMatrix bench_matrix(Index D, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index r = std::min<Index>(10, std::min(D, n));
  Eigen::MatrixXd left(D, r), right(r, n), x(D, n);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < D; ++i) left(i, j) = normal(rng);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < r; ++i) right(i, j) = normal(rng);
  x.noalias() = left * right;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < D; ++i) x(i, j) += 0.1 * normal(rng);
  return DataMatrix(std::move(x));
}

struct BenchRow {
  std::string dataset;
  std::string method;
  Index d = 0;
  double mean_s = 0.0;
  Index D = 0;
  Index n = 0;
  std::string path;
};

inline std::vector<BenchRow> run_bench(const RunConfig& cfg) {
  std::vector<BenchShape> shapes;
  for (const auto& s : cfg.shapes) shapes.push_back(parse_shape(s));
  if (shapes.empty()) shapes.push_back(parse_shape("small"));
  std::vector<BenchRow> rows;
  for (const auto& shape : shapes) {
    const DataMatrix x = bench_matrix(shape.D, shape.n, cfg.seed);
    for (const auto& method : cfg.methods) {
      RunConfig one = cfg;
      one.method = method;
      const FitOptions opt = one.fit_options();
      double total = 0.0;
      Strategy used = Strategy::Auto;
      for (Index r = 0; r < cfg.repeats; ++r) {
        detail::Stopwatch clock;
        const FitModel m = fit(x, cfg.d, opt);
        total += clock.seconds();
        used = m.fit_stats.strategy_used;
      }
      const std::string path = parse_method(method) == Method::EmPca ? "em" : std::string(to_string(used));
      rows.push_back({shape.name, method, cfg.d, total / static_cast<double>(cfg.repeats), shape.D, shape.n, path});
    }
  }
  return rows;
}

inline std::string format_bench(const std::vector<BenchRow>& rows) {
  std::ostringstream s;
  s << "dataset,method,d,mean_s,D,n,path\n";
  s.precision(6);
  for (const auto& r : rows) {
    s << r.dataset << ',' << r.method << ',' << r.d << ',' << std::fixed << r.mean_s << std::defaultfloat << ','
      << r.D << ',' << r.n << ',' << r.path << '\n';
  }
  return s.str();
}

inline int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const std::string table = format_bench(run_bench(cfg));
  if (!cfg.output.empty()) write_file_atomic(cfg.output, table);
  out << table;
  return kOk;
}

// ---- parsing -----------------------------------------------------------------

namespace detail {

inline void add_fit_flags(CLI::App* sub, RunConfig& c, Index default_d, const std::string& default_method) {
  c.d = default_d;
  c.method = default_method;
  sub->add_option("--method", c.method, "pca | em_pca | ae | tae")
      ->check(CLI::IsMember({"pca", "em_pca", "em-pca", "ae", "tae"}))
      ->capture_default_str();
  sub->add_option("--components", c.d, "number of principal components")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--eta-theta", c.eta_theta, "angular trim threshold in radians, tae only")
      ->capture_default_str();
  sub->add_option("--strategy", c.strategy, "auto | d-path | n-path | randomized")
      ->check(CLI::IsMember({"auto", "d-path", "n-path", "randomized"}))
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for every random draw")->capture_default_str();
  sub->add_option("--block", c.block, "rows per cosine-matrix block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace detail

/// Parses argv, runs the command, and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Angular Embedding robust PCA toolkit"};
  app.require_subcommand(1);
  RunConfig fit_cfg, rec_cfg, trim_cfg, synth_cfg, bg_cfg, faces_cfg, bench_cfg;

  auto* fit_cmd = app.add_subcommand("fit", "fit a model to a CSV (rows = samples) and write model JSON");
  detail::add_fit_flags(fit_cmd, fit_cfg, 1, "ae");
  fit_cmd->add_option("--input", fit_cfg.input, "input CSV")->required();
  fit_cmd->add_option("--output", fit_cfg.output, "model JSON path")->required();

  auto* rec_cmd = app.add_subcommand("reconstruct", "reconstruct CSV samples through a saved model");
  rec_cmd->add_option("--model", rec_cfg.model, "model JSON")->required();
  rec_cmd->add_option("--input", rec_cfg.input, "input CSV")->required();
  rec_cmd->add_option("--output", rec_cfg.output, "output CSV")->required();

  auto* trim_cmd = app.add_subcommand("trim-report", "cosine pre-trimming report for a CSV");
  trim_cmd->add_option("--input", trim_cfg.input, "input CSV")->required();
  trim_cmd->add_option("--eta-theta", trim_cfg.eta_theta, "angular threshold in radians")->capture_default_str();
  trim_cmd->add_option("--block", trim_cfg.block, "rows per cosine-matrix block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  trim_cmd->add_option("--output", trim_cfg.output, "optional JSON path");

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic data");
  synth_cfg.preset = "canonical";
  synth_cmd->add_option("--preset", synth_cfg.preset, "canonical | four-class-3d | custom | moving-square | faces")
      ->check(CLI::IsMember({"canonical", "four-class-3d", "custom", "moving-square", "faces"}))
      ->capture_default_str();
  synth_cmd->add_option("--output", synth_cfg.output, "CSV path (vector presets) or directory (frame presets)")
      ->required();
  synth_cmd->add_option("--seed", synth_cfg.seed, "seed")->capture_default_str();
  synth_cmd->add_option("--dim", synth_cfg.dim, "custom: feature count D")->capture_default_str();
  synth_cmd->add_option("--rank", synth_cfg.rank, "custom: true subspace rank")->capture_default_str();
  synth_cmd->add_option("--n-inliers", synth_cfg.n_inliers, "custom: inlier count")->capture_default_str();
  synth_cmd->add_option("--fraction", synth_cfg.fraction, "custom: outlier fraction in [0, 1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth_cmd->add_option("--magnitude", synth_cfg.magnitude, "custom: outlier magnitude")->capture_default_str();
  synth_cmd->add_option("--noise", synth_cfg.noise, "custom: inlier noise stddev")->capture_default_str();
  synth_cmd->add_option("--mode", synth_cfg.mode, "custom: orthogonal | random")
      ->check(CLI::IsMember({"orthogonal", "random"}))
      ->capture_default_str();

  auto* bg_cmd = app.add_subcommand("bgmodel", "low-rank background modeling over PGM frames");
  detail::add_fit_flags(bg_cmd, bg_cfg, kBackgroundComponents, "tae");
  bg_cmd->add_option("--frames", bg_cfg.frames, "directory or glob of .pgm frames")->required();
  bg_cmd->add_option("--output", bg_cfg.output, "output directory")->required();
  bg_cmd->add_option("--reference", bg_cfg.reference, "clean background PGM for RMSE");

  auto* faces_cmd = app.add_subcommand("faces", "shadow removal by low-rank face reconstruction");
  detail::add_fit_flags(faces_cmd, faces_cfg, kFaceComponents, "tae");
  faces_cmd->add_option("--frames", faces_cfg.frames, "directory or glob of .pgm faces")->required();
  faces_cmd->add_option("--output", faces_cfg.output, "output directory")->required();

  auto* bench_cmd = app.add_subcommand("bench", "mean running time per method");
  detail::add_fit_flags(bench_cmd, bench_cfg, kBackgroundComponents, "ae");
  bench_cmd->add_option("--preset", bench_cfg.shapes, "small | yale | water | airport | DxN (repeatable)");
  bench_cmd->add_option("--methods", bench_cfg.methods, "methods to time")
      ->delimiter(',')
      ->check(CLI::IsMember({"pca", "em_pca", "em-pca", "ae", "tae"}))
      ->capture_default_str();
  bench_cmd->add_option("--repeats", bench_cfg.repeats, "runs per method")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--output", bench_cfg.output, "optional CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const unsigned threads = threads_from_env();
    auto prepare = [&](RunConfig& c, const char* name, bool needs_eta) -> RunConfig& {
      c.command = name;
      c.threads = threads;
      if (needs_eta && !(c.eta_theta > 0.0 && c.eta_theta < std::numbers::pi / 2)) {
        throw Error(ErrorCode::InvalidThreshold, "--eta-theta must lie strictly inside (0, pi/2)");
      }
      return c;
    };
    if (fit_cmd->parsed()) return cmd_fit(prepare(fit_cfg, "fit", fit_cfg.method == "tae"), out);
    if (rec_cmd->parsed()) return cmd_reconstruct(prepare(rec_cfg, "reconstruct", false), out);
    if (trim_cmd->parsed()) return cmd_trim_report(prepare(trim_cfg, "trim-report", true), out);
    if (synth_cmd->parsed()) return cmd_synth(prepare(synth_cfg, "synth", false), out);
    if (bg_cmd->parsed()) return cmd_bgmodel(prepare(bg_cfg, "bgmodel", bg_cfg.method == "tae"), out);
    if (faces_cmd->parsed()) return cmd_faces(prepare(faces_cfg, "faces", faces_cfg.method == "tae"), out);
    if (bench_cmd->parsed()) {
      bool tae = false;
      for (const auto& m : bench_cfg.methods) tae = tae || m == "tae";
      return cmd_bench(prepare(bench_cfg, "bench", tae), out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}

}  // namespace angemb::cli

#endif  // ANGEMB_TOOLS_CLI_APP_HPP
