#ifndef ANGEMB_IMAGING_HPP
#define ANGEMB_IMAGING_HPP

/**
 * @file imaging.hpp
 * @brief Low-rank background modeling and face shadow removal over frame stacks.
 *
 * Both pipelines fit a subspace with any supported method and reconstruct
 * every frame as mean + Q Q^T (frame - mean). Moving objects and cast
 * shadows are what the low-rank reconstruction fails to explain.
 */

#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "angemb/fit.hpp"
#include "angemb/frames.hpp"

namespace angemb {

inline constexpr Index kBackgroundComponents = 5;
inline constexpr Index kFaceComponents = 9;

struct BackgroundResult {
  FitModel model;
  Eigen::MatrixXd background_raw;  // unclamped reconstruction
  FrameStack backgrounds;          // clamped to [0, 255]
  FrameStack foreground;           // |frame - background|
};

struct ShadowResult {
  FitModel model;
  Eigen::MatrixXd reconstructed_raw;
  FrameStack reconstructed;
  FrameStack inverted_difference;  // 255 - |frame - reconstruction|
};

namespace detail {

inline FrameStack like(const FrameStack& src, Eigen::MatrixXd frames) {
  FrameStack out;
  out.width = src.width;
  out.height = src.height;
  out.frames = std::move(frames);
  out.names = src.names;
  return out;
}

inline Eigen::MatrixXd clamp_intensity(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0).cwiseMin(255.0); }

inline void require_stack(const FrameStack& stack) {
  if (stack.n() < 1) throw Error(ErrorCode::EmptyInput, "frame stack is empty");
  if (stack.frames.rows() != stack.pixels()) {
    throw Error(ErrorCode::MixedDimensions, "frame rows do not match width*height");
  }
}

// A stack without any variation centers to all-zero columns, which leaves the
// sphere mapping empty. Every frame then reconstructs to the mean and the basis
// is irrelevant, so a placeholder basis with zero eigenvalues is returned.
inline FitModel fit_frames(const DataMatrix& x, Index d, const FitOptions& opt) {
  try {
    return fit(x, d, opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyAfterNormalization) throw;
  }
  FitModel model;
  model.mean = x.values.rowwise().mean();
  model.method = opt.method;
  model.subspace.basis = Eigen::MatrixXd::Identity(x.D(), d);
  model.subspace.eigenvalues = Eigen::VectorXd::Zero(d);
  model.fit_stats.dropped_zero_norm = x.n();
  if (opt.method == Method::Tae) {
    TrimReport rep;
    rep.eta_theta = opt.eta_theta;
    rep.cos_threshold = std::cos(opt.eta_theta);
    model.trim = std::move(rep);
  }
  return model;
}

}  // namespace detail

inline BackgroundResult background_model(const FrameStack& stack, Index d = kBackgroundComponents,
                                         const FitOptions& opt = {}) {
  detail::require_stack(stack);
  const DataMatrix x(stack.frames);
  BackgroundResult out;
  out.model = detail::fit_frames(x, d, opt);
  out.background_raw = reconstruct(out.model, x).values;
  out.backgrounds = detail::like(stack, detail::clamp_intensity(out.background_raw));
  out.foreground = detail::like(stack, (stack.frames - out.backgrounds.frames).cwiseAbs());
  return out;
}

inline ShadowResult shadow_removal(const FrameStack& stack, Index d = kFaceComponents, const FitOptions& opt = {}) {
  detail::require_stack(stack);
  const DataMatrix x(stack.frames);
  ShadowResult out;
  out.model = detail::fit_frames(x, d, opt);
  out.reconstructed_raw = reconstruct(out.model, x).values;
  out.reconstructed = detail::like(stack, detail::clamp_intensity(out.reconstructed_raw));
  const Eigen::MatrixXd diff = (stack.frames - out.reconstructed.frames).cwiseAbs();
  out.inverted_difference =
      detail::like(stack, detail::clamp_intensity((Eigen::MatrixXd::Constant(diff.rows(), diff.cols(), 255.0) - diff)));
  return out;
}

/// Root-mean-square error of every frame against one reference image.
inline double rmse_against(const Eigen::MatrixXd& frames, const Eigen::VectorXd& reference) {
  if (frames.rows() != reference.size() || frames.size() == 0) {
    throw Error(ErrorCode::InvalidData, "rmse: reference does not match frame size");
  }
  return std::sqrt((frames.colwise() - reference).squaredNorm() / static_cast<double>(frames.size()));
}

/// Synthetic surveillance clip with a known clean background.
struct SyntheticVideo {
  FrameStack video;
  Eigen::VectorXd background;
  IndexList intruded;  // frames that contain the moving square
};

/**
 * Static horizontal/vertical intensity gradient, Gaussian sensor noise
 * (sigma 0.5) on every frame, and a 10x10 square of intensity 250 in a seeded
 * subset of frames.
 */
inline SyntheticVideo moving_square_video(std::uint64_t seed, Index width = 64, Index height = 48,
                                          Index frames = 100, Index intruded = 20) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  SyntheticVideo out;
  out.background.resize(width * height);
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      out.background[r * width + c] = 40.0 + 120.0 * static_cast<double>(c) / static_cast<double>(width - 1) +
                                      40.0 * static_cast<double>(r) / static_cast<double>(height - 1);
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(frames));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  out.intruded.assign(order.begin(), order.begin() + intruded);
  std::sort(out.intruded.begin(), out.intruded.end());

  const Index side = 10;
  std::uniform_int_distribution<Index> pos_r(0, height - side);
  std::uniform_int_distribution<Index> pos_c(0, width - side);
  FrameStack& v = out.video;
  v.width = width;
  v.height = height;
  v.frames.resize(width * height, frames);
  auto next_intruder = out.intruded.begin();
  for (Index k = 0; k < frames; ++k) {
    for (Index p = 0; p < width * height; ++p) v.frames(p, k) = out.background[p] + noise(rng);
    if (next_intruder != out.intruded.end() && *next_intruder == k) {
      ++next_intruder;
      const Index r0 = pos_r(rng);
      const Index c0 = pos_c(rng);
      for (Index r = r0; r < r0 + side; ++r) {
        for (Index c = c0; c < c0 + side; ++c) v.frames(r * width + c, k) = 250.0;
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04ld", static_cast<long>(k));
    v.names.emplace_back(name);
  }
  return out;
}

/**
 * Faces of rank at most `rank` around a mean face: smooth separable cosine
 * patterns with seeded coefficients, kept well inside [0, 255]. Coefficient
 * scales decay with the pattern index so one illumination-like mode dominates,
 * as it does in real face stacks.
 */
inline FrameStack synthetic_faces(std::uint64_t seed, Index count = 64, Index width = 24, Index height = 28,
                                  Index rank = 9) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Eigen::MatrixXd patterns(width * height, rank);
  Eigen::VectorXd mean_face(width * height);
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      const double y = (static_cast<double>(r) + 0.5) / static_cast<double>(height);
      const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(width);
      mean_face[r * width + c] = 128.0 + 30.0 * std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.45) * (y - 0.45)) * 8.0);
      for (Index k = 0; k < rank; ++k) {
        const double fx = static_cast<double>(k % 3 + 1);
        const double fy = static_cast<double>(k / 3 + 1);
        patterns(r * width + c, k) = std::cos(std::numbers::pi * fx * x) * std::cos(std::numbers::pi * fy * y);
      }
    }
  }
  FrameStack out;
  out.width = width;
  out.height = height;
  out.frames.resize(width * height, count);
  for (Index j = 0; j < count; ++j) {
    Eigen::VectorXd a(rank);
    for (Index k = 0; k < rank; ++k) a[k] = 30.0 / std::pow(static_cast<double>(k + 1), 1.2) * coef(rng);
    out.frames.col(j) = mean_face + patterns * a;
    char name[32];
    std::snprintf(name, sizeof name, "face_%03ld", static_cast<long>(j));
    out.names.emplace_back(name);
  }
  return out;
}

}  // namespace angemb

#endif  // ANGEMB_IMAGING_HPP
