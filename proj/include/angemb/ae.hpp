#ifndef ANGEMB_AE_HPP
#define ANGEMB_AE_HPP

/**
 * @file ae.hpp
 * @brief Angular Embedding: subspace fitting by squared-cosine maximization.
 *
 * Centered samples are mapped onto the unit hypersphere, after which the
 * d-dimensional subspace maximizing sum_i sum_j cos^2(u_i, q_j) is the top-d
 * eigenspace of U*U^T. Sample magnitude therefore has no influence on the fit.
 */

#include <chrono>
#include <cmath>
#include <numbers>

#include "angemb/linalg.hpp"
#include "angemb/model.hpp"

namespace angemb {

struct FitConfig {
  Strategy strategy = Strategy::Auto;
  double zero_tol = kDefaultZeroTol;
  std::uint64_t seed = 0;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void require_model_input(const FitModel& model, const DataMatrix& x) {
  if (x.D() != model.D() || model.mean.size() != model.D()) {
    throw Error(ErrorCode::InvalidData, "model has D = " + std::to_string(model.D()) + " but data has D = " +
                                            std::to_string(x.D()));
  }
}

}  // namespace detail

inline FitModel fit_ae(const DataMatrix& x, Index d, const FitConfig& config = {}) {
  detail::Stopwatch clock;
  detail::require_rank(d, std::min(x.D(), x.n()));
  auto [mean, centered] = center(x);
  const SphereData sphere = normalize_columns(centered, config.zero_tol);

  FitModel model;
  model.mean = std::move(mean);
  model.method = Method::Ae;
  model.fit_stats.strategy_used = resolve_strategy(sphere.D(), sphere.m(), d, config.strategy);
  model.subspace = dominant_subspace(sphere, d, config.strategy, config.seed);
  model.fit_stats.samples_used = sphere.m();
  model.fit_stats.dropped_zero_norm = static_cast<Index>(sphere.dropped.size());
  model.fit_stats.wall_time_s = clock.seconds();
  return model;
}

/// trace(Q^T U U^T Q): the summed squared cosines between samples and basis vectors.
template <typename Derived>
double objective(const Eigen::MatrixBase<Derived>& units, const Subspace& q) {
  if (units.rows() != q.D()) {
    throw Error(ErrorCode::InvalidData, "objective: U has D = " + std::to_string(units.rows()) +
                                            ", basis has D = " + std::to_string(q.D()));
  }
  return (q.basis.transpose() * units).squaredNorm();
}

inline double objective(const SphereData& u, const Subspace& q) { return objective(u.units, q); }

/// Coordinates Q^T (X - mean), d x n.
inline Eigen::MatrixXd project(const FitModel& model, const DataMatrix& x) {
  detail::require_model_input(model, x);
  return model.subspace.basis.transpose() * (x.values.colwise() - model.mean);
}

/// mean + Q Q^T (X - mean), applied in the original data scale.
inline DataMatrix reconstruct(const FitModel& model, const DataMatrix& x) {
  const Eigen::MatrixXd coords = project(model, x);
  Eigen::MatrixXd out = model.subspace.basis * coords;
  out.colwise() += model.mean;
  return DataMatrix(std::move(out));
}

struct PhiRange {
  double max = 0.0;
  double min = 0.0;
  double range() const { return max - min; }
};

/**
 * Sweeps q through `sweep` evenly spaced directions of the plane spanned by
 * u_i and u_j (half a turn suffices since phi(q) = phi(-q)) and reports the
 * extremes of phi(q) = cos^2(q, u_i) + cos^2(q, u_j).
 */
template <typename A, typename B>
PhiRange theorem1_range(const Eigen::MatrixBase<A>& ui, const Eigen::MatrixBase<B>& uj, Index sweep) {
  if (ui.size() != uj.size() || sweep < 1) {
    throw Error(ErrorCode::InvalidData, "theorem1_range: mismatched vectors or empty sweep");
  }
  const Eigen::VectorXd e1 = ui;
  Eigen::VectorXd e2 = uj - e1.dot(uj) * e1;
  const double perp = e2.norm();
  if (perp < 1e-12) throw Error(ErrorCode::InvalidData, "theorem1_range: inputs are parallel");
  e2 /= perp;

  PhiRange out{-1.0, 3.0};
  for (Index k = 0; k < sweep; ++k) {
    const double t = std::numbers::pi * static_cast<double>(k) / static_cast<double>(sweep);
    const Eigen::VectorXd q = std::cos(t) * e1 + std::sin(t) * e2;
    const double ci = q.dot(ui);
    const double cj = q.dot(uj);
    const double phi = ci * ci + cj * cj;
    out.max = std::max(out.max, phi);
    out.min = std::min(out.min, phi);
  }
  return out;
}

}  // namespace angemb

#endif  // ANGEMB_AE_HPP
