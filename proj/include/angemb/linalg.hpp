#ifndef ANGEMB_LINALG_HPP
#define ANGEMB_LINALG_HPP

/**
 * @file linalg.hpp
 * @brief Centering, hypersphere normalization and symmetric eigen-solvers.
 *
 * Samples are stored column-wise: a data matrix is D x n with one sample per
 * column. Every dominant-subspace route goes through a symmetric eigenproblem,
 * either on the D x D scatter U*U^T or on the n x n Gram matrix U^T*U.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "angemb/error.hpp"

namespace angemb {

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Column-major sample collection X (D x n) with its per-feature mean.
struct DataMatrix {
  Eigen::MatrixXd values;
  Eigen::VectorXd mean;  // all-zero until centering

  DataMatrix() = default;
  explicit DataMatrix(Eigen::MatrixXd v)
      : values(std::move(v)), mean(Eigen::VectorXd::Zero(values.rows())) {}
  DataMatrix(Eigen::MatrixXd v, Eigen::VectorXd m) : values(std::move(v)), mean(std::move(m)) {}

  Index D() const { return values.rows(); }
  Index n() const { return values.cols(); }
};

/// Unit-normalized columns plus the source columns that had (near) zero norm.
struct SphereData {
  Eigen::MatrixXd units;
  IndexList dropped;  // strictly increasing
  Index source_n = 0;

  Index D() const { return units.rows(); }
  Index m() const { return units.cols(); }

  /// Source index of every kept column, in order.
  IndexList kept() const {
    IndexList out;
    out.reserve(static_cast<std::size_t>(m()));
    auto drop = dropped.begin();
    for (Index j = 0; j < source_n; ++j) {
      if (drop != dropped.end() && *drop == j) {
        ++drop;
        continue;
      }
      out.push_back(j);
    }
    return out;
  }
};

/// Orthonormal basis (D x d) with nonincreasing eigenvalues.
struct Subspace {
  Eigen::MatrixXd basis;
  Eigen::VectorXd eigenvalues;

  Index D() const { return basis.rows(); }
  Index d() const { return basis.cols(); }
};

enum class Strategy { Auto, DPath, NPath, Randomized };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::DPath: return "d-path";
    case Strategy::NPath: return "n-path";
    case Strategy::Randomized: return "randomized";
  }
  return "auto";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "auto") return Strategy::Auto;
  if (s == "d-path" || s == "d_path") return Strategy::DPath;
  if (s == "n-path" || s == "n_path") return Strategy::NPath;
  if (s == "randomized") return Strategy::Randomized;
  throw Error(ErrorCode::InvalidData, "unknown strategy '" + std::string(s) + "'");
}

inline constexpr double kDefaultZeroTol = 1e-12;
inline constexpr double kEigenFloor = 1e-12;
inline constexpr Index kRandomizedMinSize = 1024;
inline constexpr Index kDefaultOversample = 10;
inline constexpr Index kDefaultPowerIters = 2;

/// Throws InvalidData naming the first non-finite entry.
template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (!std::isfinite(m(r, c))) {
        throw Error(ErrorCode::InvalidData,
                    "non-finite entry at row " + std::to_string(r) + ", col " + std::to_string(c));
      }
    }
  }
}

/// Flip each column so that its largest-magnitude entry (first on ties) is positive.
template <typename Derived>
void canonicalize_signs(Eigen::MatrixBase<Derived>& basis) {
  for (Index c = 0; c < basis.cols(); ++c) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index r = 0; r < basis.rows(); ++r) {
      const double a = std::abs(basis(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (basis(best, c) < 0.0) basis.col(c) = -basis.col(c);
  }
}

inline std::pair<Eigen::VectorXd, DataMatrix> center(const DataMatrix& x) {
  if (x.D() < 1 || x.n() < 1) throw Error(ErrorCode::InvalidData, "empty data matrix");
  require_finite(x.values);
  Eigen::VectorXd mean = x.values.rowwise().mean();
  Eigen::MatrixXd centered = x.values.colwise() - mean;
  return {mean, DataMatrix(std::move(centered), mean)};
}

template <typename Derived>
SphereData normalize_columns(const Eigen::MatrixBase<Derived>& xc, double zero_tol = kDefaultZeroTol) {
  SphereData out;
  out.source_n = xc.cols();
  IndexList kept;
  Eigen::VectorXd norms(xc.cols());
  for (Index j = 0; j < xc.cols(); ++j) {
    norms[j] = xc.col(j).norm();
    if (norms[j] <= zero_tol) {
      out.dropped.push_back(j);
    } else {
      kept.push_back(j);
    }
  }
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyAfterNormalization, "every column has norm <= " + std::to_string(zero_tol));
  }
  out.units.resize(xc.rows(), static_cast<Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Index j = kept[k];
    out.units.col(static_cast<Index>(k)) = xc.col(j) / norms[j];
  }
  return out;
}

inline SphereData normalize_columns(const DataMatrix& xc, double zero_tol = kDefaultZeroTol) {
  return normalize_columns(xc.values, zero_tol);
}

namespace detail {

// Top-d eigenpairs of a symmetric matrix, largest first.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> top_eigenpairs(const Eigen::MatrixXd& sym, Index d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::RankDeficient, "symmetric eigensolver did not converge");
  }
  const Index k = sym.rows();
  Eigen::MatrixXd vecs(k, d);
  Eigen::VectorXd vals(d);
  for (Index i = 0; i < d; ++i) {
    vecs.col(i) = es.eigenvectors().col(k - 1 - i);
    vals[i] = es.eigenvalues()[k - 1 - i];
  }
  return {std::move(vecs), std::move(vals)};
}

inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

inline Subspace finish(Eigen::MatrixXd basis, Eigen::VectorXd values) {
  canonicalize_signs(basis);
  for (Index i = 0; i < values.size(); ++i) values[i] = std::max(values[i], 0.0);
  return Subspace{std::move(basis), std::move(values)};
}

inline void require_rank(Index d, Index limit) {
  if (d < 1 || d > limit) {
    throw Error(ErrorCode::InvalidRank,
                "requested " + std::to_string(d) + " components, allowed range [1, " + std::to_string(limit) + "]");
  }
}

}  // namespace detail

/// Strategy actually used for a D x m input when `requested` is Auto.
inline Strategy resolve_strategy(Index D, Index m, Index d, Strategy requested) {
  if (requested != Strategy::Auto) return requested;
  const Index small = std::min(D, m);
  if (small > kRandomizedMinSize && d <= small / 10) return Strategy::Randomized;
  return D <= m ? Strategy::DPath : Strategy::NPath;
}

/**
 * Halko-style randomized range finder for the dominant eigenspace of U*U^T.
 *
 * A seeded Gaussian sketch is pushed through `power_iters` applications of
 * U*U^T with re-orthonormalization after each pass; the top-d eigenpairs of
 * the projected l x l problem (l = d + oversample) are lifted back.
 */
template <typename Derived>
Subspace randomized_range(const Eigen::MatrixBase<Derived>& u, Index d, Index oversample, Index power_iters,
                          std::uint64_t seed) {
  const Index width = d + oversample;
  if (d < 1 || oversample < 0 || width > std::min(u.rows(), u.cols())) {
    throw Error(ErrorCode::InvalidRank, "sketch width " + std::to_string(width) + " exceeds min(D, m) = " +
                                            std::to_string(std::min(u.rows(), u.cols())));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd omega(u.cols(), width);
  for (Index c = 0; c < width; ++c) {
    for (Index r = 0; r < u.cols(); ++r) omega(r, c) = normal(rng);
  }
  Eigen::MatrixXd q = detail::orthonormalize(u * omega);
  for (Index it = 0; it < power_iters; ++it) {
    Eigen::MatrixXd ut_q = u.transpose() * q;
    q = detail::orthonormalize(u * ut_q);
  }
  const Eigen::MatrixXd b = q.transpose() * u;
  const Eigen::MatrixXd small = b * b.transpose();
  auto [vecs, vals] = detail::top_eigenpairs(small, d);
  return detail::finish(q * vecs, std::move(vals));
}

template <typename Derived>
Subspace randomized_range(const Eigen::MatrixBase<Derived>& u, Index d, std::uint64_t seed) {
  return randomized_range(u, d, kDefaultOversample, kDefaultPowerIters, seed);
}

inline Subspace randomized_range(const SphereData& u, Index d, Index oversample, Index power_iters,
                                 std::uint64_t seed) {
  return randomized_range(u.units, d, oversample, power_iters, seed);
}

/// Top-d eigenvectors of U*U^T for column data U (D x m); see Strategy.
template <typename Derived>
Subspace dominant_subspace(const Eigen::MatrixBase<Derived>& u, Index d, Strategy strategy = Strategy::Auto,
                           std::uint64_t seed = 0) {
  const Index D = u.rows();
  const Index m = u.cols();
  detail::require_rank(d, std::min(D, m));

  switch (resolve_strategy(D, m, d, strategy)) {
    case Strategy::DPath: {
      const Eigen::MatrixXd scatter = u * u.transpose();
      auto [vecs, vals] = detail::top_eigenpairs(scatter, d);
      return detail::finish(std::move(vecs), std::move(vals));
    }
    case Strategy::NPath: {
      const Eigen::MatrixXd gram = u.transpose() * u;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
      if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::RankDeficient, "symmetric eigensolver did not converge");
      }
      Eigen::MatrixXd basis(D, d);
      Eigen::VectorXd vals(d);
      Index found = 0;
      for (Index i = m - 1; i >= 0 && found < d; --i) {
        const double lambda = es.eigenvalues()[i];
        if (lambda <= kEigenFloor) break;
        Eigen::VectorXd lifted = u * es.eigenvectors().col(i);
        basis.col(found) = lifted / lifted.norm();
        vals[found] = lambda;
        ++found;
      }
      if (found < d) {
        throw Error(ErrorCode::RankDeficient, "only " + std::to_string(found) + " eigenvalues above " +
                                                  std::to_string(kEigenFloor) + ", need " + std::to_string(d));
      }
      return detail::finish(std::move(basis), std::move(vals));
    }
    case Strategy::Randomized:
      return randomized_range(u, d, kDefaultOversample, kDefaultPowerIters, seed);
    case Strategy::Auto:
      break;
  }
  throw Error(ErrorCode::InvalidData, "unresolved strategy");
}

inline Subspace dominant_subspace(const SphereData& u, Index d, Strategy strategy = Strategy::Auto,
                                  std::uint64_t seed = 0) {
  return dominant_subspace(u.units, d, strategy, seed);
}

/**
 * Principal angles between equal-rank subspaces, nondecreasing, in [0, pi/2].
 *
 * Cosines are the singular values of Q1^T*Q2; sines come from the residual
 * Q2 - Q1*Q1^T*Q2 so that tiny angles keep full relative precision.
 */
template <typename A, typename B>
Eigen::VectorXd principal_angles(const Eigen::MatrixBase<A>& q1, const Eigen::MatrixBase<B>& q2) {
  if (q1.rows() != q2.rows() || q1.cols() != q2.cols()) {
    throw Error(ErrorCode::InvalidData, "principal_angles: shapes " + std::to_string(q1.rows()) + "x" +
                                            std::to_string(q1.cols()) + " and " + std::to_string(q2.rows()) +
                                            "x" + std::to_string(q2.cols()) + " differ");
  }
  const Index d = q1.cols();
  const Eigen::MatrixXd cross = q1.transpose() * q2;
  const Eigen::MatrixXd residual = q2 - q1 * cross;
  Eigen::VectorXd cosines = Eigen::JacobiSVD<Eigen::MatrixXd>(cross).singularValues();  // descending
  Eigen::VectorXd sines = Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues();
  std::sort(sines.data(), sines.data() + sines.size());
  Eigen::VectorXd angles(d);
  for (Index i = 0; i < d; ++i) {
    const double c = std::clamp(cosines[i], 0.0, 1.0);
    const double s = std::clamp(sines[i], 0.0, 1.0);
    angles[i] = std::atan2(s, c);
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

inline Eigen::VectorXd principal_angles(const Subspace& a, const Subspace& b) {
  return principal_angles(a.basis, b.basis);
}

inline double max_principal_angle(const Subspace& a, const Subspace& b) {
  return principal_angles(a, b).maxCoeff();
}

}  // namespace angemb

#endif  // ANGEMB_LINALG_HPP
