#ifndef ANGEMB_SYNTH_HPP
#define ANGEMB_SYNTH_HPP

/**
 * @file synth.hpp
 * @brief Synthetic data with planted vector-level outliers, and recovery metrics.
 */

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "angemb/linalg.hpp"
#include "angemb/model.hpp"

namespace angemb {

enum class OutlierMode { Orthogonal, Random };

inline std::string_view to_string(OutlierMode m) { return m == OutlierMode::Orthogonal ? "orthogonal" : "random"; }

struct SynthSpec {
  Index D = 10;
  Index n_inliers = 500;
  Subspace true_basis;
  double inlier_noise = 0.0;
  double outlier_fraction = 0.0;
  double outlier_magnitude = 1.0;
  OutlierMode outlier_direction_mode = OutlierMode::Orthogonal;
  std::uint64_t seed = 0;

  Index planted_count() const { return static_cast<Index>(std::llround(outlier_fraction * static_cast<double>(n_inliers))); }
};

struct SynthResult {
  DataMatrix data;
  IndexList outlier_indices;
  Subspace true_basis;
  std::vector<int> labels;  // class label per column where the generator has classes, else empty
};

/// Seeded random D x d orthonormal basis (QR of a Gaussian matrix).
inline Subspace random_orthonormal_basis(Index D, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(D, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < D; ++i) g(i, j) = normal(rng);
  }
  Eigen::MatrixXd q = detail::orthonormalize(g);
  canonicalize_signs(q);
  return Subspace{std::move(q), Eigen::VectorXd::Ones(d)};
}

/**
 * Inliers are true_basis * z + noise with z standard normal; outliers are
 * magnitude * direction + noise where the direction is a unit vector either
 * orthogonal to the true subspace or uniform on the sphere. Outlier
 * directions come in antipodal pairs, so the planted set is balanced around
 * the origin and does not drag the sample mean off the inlier subspace.
 * Columns are shuffled and the outlier positions recorded.
 */
inline SynthResult generate(const SynthSpec& spec) {
  const Index D = spec.D;
  const Index r = spec.true_basis.d();
  if (spec.true_basis.D() != D) throw Error(ErrorCode::InvalidData, "true_basis row count differs from D");
  if (r < 1 || r >= D) {
    throw Error(ErrorCode::InvalidRank, "true rank " + std::to_string(r) + " must lie in [1, D)");
  }
  const Eigen::MatrixXd gram = spec.true_basis.basis.transpose() * spec.true_basis.basis;
  if ((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::InvalidData, "true_basis is not orthonormal");
  }
  if (spec.n_inliers < 1 || !(spec.outlier_fraction >= 0.0 && spec.outlier_fraction < 1.0) ||
      !(spec.outlier_magnitude >= 0.0) || !(spec.inlier_noise >= 0.0)) {
    throw Error(ErrorCode::InvalidData, "synthetic spec out of range");
  }

  const Eigen::MatrixXd& b = spec.true_basis.basis;
  const Index n_out = spec.planted_count();
  const Index n = spec.n_inliers + n_out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Index rows) {
    Eigen::VectorXd v(rows);
    for (Index i = 0; i < rows; ++i) v[i] = normal(rng);
    return v;
  };

  Eigen::MatrixXd raw(D, n);
  for (Index j = 0; j < spec.n_inliers; ++j) {
    const Eigen::VectorXd z = gaussian(r);
    raw.col(j) = b * z + spec.inlier_noise * gaussian(D);
  }
  Eigen::VectorXd dir(D);
  for (Index k = 0; k < n_out; ++k) {
    if (k % 2 == 0) {
      dir = gaussian(D);
      if (spec.outlier_direction_mode == OutlierMode::Orthogonal) dir -= b * (b.transpose() * dir);
      dir.normalize();
    } else {
      dir = -dir;
    }
    raw.col(spec.n_inliers + k) = spec.outlier_magnitude * dir + spec.inlier_noise * gaussian(D);
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  SynthResult out;
  out.data = DataMatrix(Eigen::MatrixXd(D, n));
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.data.values.col(k) = raw.col(src);
    if (src >= spec.n_inliers) out.outlier_indices.push_back(k);
  }
  out.true_basis = spec.true_basis;
  return out;
}

/// D = 10, one true direction, 500 inliers, 10% orthogonal outliers at magnitude 10, seed 42.
inline SynthSpec canonical_robustness_spec() {
  SynthSpec spec;
  spec.D = 10;
  spec.n_inliers = 500;
  spec.true_basis = random_orthonormal_basis(10, 1, 42);
  spec.inlier_noise = 1e-3;
  spec.outlier_fraction = 0.1;
  spec.outlier_magnitude = 10.0;
  spec.outlier_direction_mode = OutlierMode::Orthogonal;
  spec.seed = 42;
  return spec;
}

/**
 * Illustrative 3-D set with four classes spread over the x-y plane and 10% of
 * samples shifted along z. The geometry is arbitrary: cluster centers at
 * (+-4, +-1) and (+-1, -+3), spread 0.5, outlier shift 8.
 */
inline SynthResult four_class_3d(std::uint64_t seed, Index per_class = 100) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.5);
  const double centers[4][2] = {{4.0, 1.0}, {-4.0, -1.0}, {1.0, -3.0}, {-1.0, 3.0}};
  const Index n = 4 * per_class;
  Eigen::MatrixXd x(3, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const int cls = static_cast<int>(j / per_class);
    labels[static_cast<std::size_t>(j)] = cls;
    x(0, j) = centers[cls][0] + normal(rng);
    x(1, j) = centers[cls][1] + normal(rng);
    x(2, j) = 0.1 * normal(rng);
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const Index shifted = n / 10;

  SynthResult out;
  out.data = DataMatrix(std::move(x));
  for (Index k = 0; k < shifted; ++k) out.outlier_indices.push_back(order[static_cast<std::size_t>(k)]);
  std::sort(out.outlier_indices.begin(), out.outlier_indices.end());
  for (Index j : out.outlier_indices) out.data.values(2, j) += 8.0;
  Eigen::MatrixXd plane = Eigen::MatrixXd::Zero(3, 2);
  plane(0, 0) = 1.0;
  plane(1, 1) = 1.0;
  out.true_basis = Subspace{plane, Eigen::VectorXd::Ones(2)};
  out.labels = std::move(labels);
  return out;
}

/// Largest principal angle between the fitted and true subspaces, in radians.
inline double subspace_recovery_error(const Subspace& q, const Subspace& truth) {
  return principal_angles(q, truth).maxCoeff();
}

struct TrimMetrics {
  double precision = 0.0;
  double recall = 0.0;
};

inline TrimMetrics trim_metrics(const IndexList& predicted, const IndexList& truth) {
  IndexList p = predicted, t = truth;
  std::sort(p.begin(), p.end());
  std::sort(t.begin(), t.end());
  IndexList hit;
  std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(hit));
  TrimMetrics m;
  m.precision = p.empty() ? (t.empty() ? 1.0 : 0.0) : static_cast<double>(hit.size()) / static_cast<double>(p.size());
  m.recall = t.empty() ? 1.0 : static_cast<double>(hit.size()) / static_cast<double>(t.size());
  return m;
}

inline TrimMetrics trim_metrics(const TrimReport& report, const IndexList& truth) {
  return trim_metrics(report.outliers, truth);
}

}  // namespace angemb

#endif  // ANGEMB_SYNTH_HPP
