#ifndef ANGEMB_BASELINES_HPP
#define ANGEMB_BASELINES_HPP

#include <functional>
#include <optional>
#include <random>

#include "angemb/ae.hpp"

namespace angemb {

/// Ordinary PCA: the same eigen machinery applied to centered, un-normalized columns.
inline FitModel fit_pca(const DataMatrix& x, Index d, const FitConfig& config = {}) {
  detail::Stopwatch clock;
  detail::require_rank(d, std::min(x.D(), x.n()));
  auto [mean, centered] = center(x);

  FitModel model;
  model.mean = std::move(mean);
  model.method = Method::Pca;
  model.fit_stats.strategy_used = resolve_strategy(x.D(), x.n(), d, config.strategy);
  model.subspace = dominant_subspace(centered.values, d, config.strategy, config.seed);
  model.fit_stats.samples_used = x.n();
  model.fit_stats.wall_time_s = clock.seconds();
  return model;
}

struct EmPcaOptions {
  double tol = 1e-4;
  Index max_iter = 1000;
  std::uint64_t seed = 0;
  /// Called after every E-step with (iteration, ||Xc - C Y||_F).
  std::function<void(Index, double)> on_iteration;
};

namespace detail {

struct EmRun {
  Eigen::MatrixXd loadings;
  Index iterations = 0;
};

// Solves (M) Z = R for symmetric positive-definite d x d M; empty on failure.
inline std::optional<Eigen::MatrixXd> spd_solve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& rhs) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Eigen::VectorXd diag = ldlt.vectorD();
  const double biggest = diag.cwiseAbs().maxCoeff();
  if (!(biggest > 0.0) || diag.minCoeff() <= biggest * 1e-14) return std::nullopt;
  return ldlt.solve(rhs);
}

inline std::optional<EmRun> em_iterate(const Eigen::MatrixXd& xc, Index d, const EmPcaOptions& opt,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd c(xc.rows(), d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < xc.rows(); ++i) c(i, j) = normal(rng);
  }

  EmRun run;
  for (Index it = 1; it <= opt.max_iter; ++it) {
    // E-step: Y = (C^T C)^-1 C^T Xc
    auto y = spd_solve(c.transpose() * c, c.transpose() * xc);
    if (!y) return std::nullopt;
    if (opt.on_iteration) opt.on_iteration(it, (xc - c * *y).norm());
    // M-step: C = Xc Y^T (Y Y^T)^-1
    const Eigen::MatrixXd yyt = *y * y->transpose();
    auto next_t = spd_solve(yyt, *y * xc.transpose());
    if (!next_t) return std::nullopt;
    Eigen::MatrixXd next = next_t->transpose();
    const double change = (next - c).norm() / c.norm();
    c = std::move(next);
    run.iterations = it;
    if (change < opt.tol) break;
  }
  run.loadings = std::move(c);
  return run;
}

}  // namespace detail

/**
 * EM-PCA (sensible-PCA limit of zero noise). The loop alternates least-squares
 * E and M steps until the relative Frobenius change of the loading matrix
 * drops below `tol`; the resulting subspace is then orthonormalized and
 * rotated onto the eigenvectors of its projected scatter so that components
 * come out ordered like regular PCA.
 */
inline FitModel fit_em_pca(const DataMatrix& x, Index d, const EmPcaOptions& options = {}) {
  detail::Stopwatch clock;
  detail::require_rank(d, std::min(x.D(), x.n()));
  auto [mean, centered] = center(x);
  const Eigen::MatrixXd& xc = centered.values;

  auto run = detail::em_iterate(xc, d, options, options.seed);
  if (!run) run = detail::em_iterate(xc, d, options, options.seed + 0x9e3779b97f4a7c15ULL);
  if (!run) throw Error(ErrorCode::SingularStep, "EM-PCA inner solve singular after restart");

  const Eigen::MatrixXd q = detail::orthonormalize(run->loadings);
  const Eigen::MatrixXd coords = q.transpose() * xc;
  auto [rot, vals] = detail::top_eigenpairs(coords * coords.transpose(), d);

  FitModel model;
  model.mean = std::move(mean);
  model.method = Method::EmPca;
  model.subspace = detail::finish(q * rot, std::move(vals));
  model.fit_stats.samples_used = x.n();
  model.fit_stats.iterations = run->iterations;
  model.fit_stats.wall_time_s = clock.seconds();
  return model;
}

}  // namespace angemb

#endif  // ANGEMB_BASELINES_HPP
