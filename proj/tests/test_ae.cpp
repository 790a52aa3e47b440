#include <gtest/gtest.h>

#include <numbers>

#include "angemb/ae.hpp"
#include "test_support.hpp"

using namespace angemb;
using namespace angemb::testing;

TEST(FitAe, AxisAlignedCounts) {
  Eigen::MatrixXd x(2, 6);
  x << 3, -3, 0, 0, 2, -2,  //
      0, 0, 1, -1, 0, 0;
  const FitModel m = fit_ae(DataMatrix(x), 1);
  EXPECT_EQ(m.method, Method::Ae);
  EXPECT_FALSE(m.trim.has_value());
  EXPECT_NEAR(m.subspace.basis(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(m.subspace.basis(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(m.subspace.eigenvalues[0], 4.0, 1e-12);
  EXPECT_EQ(m.fit_stats.samples_used, 6);
}

TEST(FitAe, MatchesBruteForceSweepInTwoDimensions) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd x = gaussian_matrix(2, 60, seed);
    x.row(0) *= 3.0;
    x.row(1) += 0.7 * x.row(0);
    const FitModel m = fit_ae(DataMatrix(x), 1);

    auto [mean, xc] = center(DataMatrix(x));
    const SphereData u = normalize_columns(xc);
    const Eigen::Vector2d best = sweep_argmax_2d(u.units, 3600);
    EXPECT_LT(degrees(line_angle(m.subspace.basis.col(0), best)), 0.1) << "seed " << seed;
  }
}

TEST(FitAe, IgnoresSampleMagnitude) {
  // antipodal pairs keep the mean at zero under any per-pair scaling
  const Eigen::MatrixXd base = gaussian_matrix(5, 40, 21);
  Eigen::MatrixXd x(5, 80), scaled(5, 80);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> factor(0.01, 100.0);
  for (Index k = 0; k < 40; ++k) {
    x.col(2 * k) = base.col(k);
    x.col(2 * k + 1) = -base.col(k);
    const double f = k % 2 == 0 ? 100.0 : factor(rng);
    scaled.col(2 * k) = f * base.col(k);
    scaled.col(2 * k + 1) = -f * base.col(k);
  }
  const FitModel a = fit_ae(DataMatrix(x), 2);
  const FitModel b = fit_ae(DataMatrix(scaled), 2);
  EXPECT_LT(max_principal_angle(a.subspace, b.subspace), 1e-10);
}

TEST(FitAe, DeterministicAndValid) {
  const DataMatrix x(gaussian_matrix(8, 50, 4));
  const FitModel a = fit_ae(x, 3);
  const FitModel b = fit_ae(x, 3);
  EXPECT_EQ(a.subspace.basis, b.subspace.basis);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_NO_THROW(expect_orthonormal(a.subspace.basis));
  EXPECT_TRUE(sign_canonical(a.subspace.basis));
}

TEST(FitAe, ZeroNormSamplesAreCountedAsDropped) {
  Eigen::MatrixXd x = gaussian_matrix(3, 10, 2);
  const Eigen::VectorXd mean = x.rowwise().mean();
  // a sample equal to the mean centers to exactly zero
  Eigen::MatrixXd with_mean(3, 11);
  with_mean << x, mean;
  const DataMatrix data(with_mean);
  const FitModel m = fit_ae(data, 2, FitConfig{Strategy::Auto, 1e-9, 0});
  EXPECT_EQ(m.fit_stats.dropped_zero_norm, 1);
  EXPECT_EQ(m.fit_stats.samples_used + m.fit_stats.trimmed + m.fit_stats.dropped_zero_norm, 11);
}

TEST(FitAe, Errors) {
  const DataMatrix x(gaussian_matrix(3, 5, 1));
  for (Index d : {Index{0}, Index{4}}) {
    try {
      fit_ae(x, d);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidRank);
    }
  }
  const DataMatrix constant(Eigen::MatrixXd::Constant(3, 5, 2.5));
  try {
    fit_ae(constant, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyAfterNormalization);
  }
}

TEST(Objective, UnitCases) {
  const Eigen::MatrixXd e = Eigen::MatrixXd::Identity(3, 3);
  const Subspace q1{e.col(0), Eigen::VectorXd::Ones(1)};
  const Subspace q2{e.col(1), Eigen::VectorXd::Ones(1)};
  const Eigen::MatrixXd u = e.col(0);
  EXPECT_DOUBLE_EQ(objective(u, q1), 1.0);
  EXPECT_DOUBLE_EQ(objective(u, q2), 0.0);
  EXPECT_THROW(objective(Eigen::MatrixXd::Identity(4, 1), q1), Error);
}

TEST(Objective, FittedEqualsTopEigenvalueSumAndDominatesRandom) {
  const Eigen::MatrixXd x = gaussian_matrix(12, 90, 17);
  const FitModel m = fit_ae(DataMatrix(x), 3);
  auto [mean, xc] = center(DataMatrix(x));
  const SphereData u = normalize_columns(xc);
  const double fitted = objective(u, m.subspace);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u.units * u.units.transpose());
  const double oracle = es.eigenvalues().tail(3).sum();
  EXPECT_NEAR(fitted, oracle, 1e-10 * oracle);
  EXPECT_LE(fitted, static_cast<double>(u.m()));
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Subspace q{random_orthonormal(12, 3, 1000 + s), Eigen::VectorXd::Ones(3)};
    EXPECT_GE(fitted, objective(u, q));
  }
}

TEST(Project, MeanAndBasisVectors) {
  const FitModel m = fit_ae(DataMatrix(gaussian_matrix(4, 30, 8)), 2);
  Eigen::MatrixXd x(4, 2);
  x.col(0) = m.mean;
  x.col(1) = m.mean + m.subspace.basis.col(0);
  const Eigen::MatrixXd c = project(m, DataMatrix(x));
  EXPECT_LT(c.col(0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(c(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(c(1, 1), 0.0, 1e-12);
  EXPECT_THROW(project(m, DataMatrix(gaussian_matrix(5, 2, 0))), Error);
}

TEST(Reconstruct, InSpanDataIsExact) {
  const FitModel m = fit_ae(DataMatrix(gaussian_matrix(6, 40, 9)), 2);
  const Eigen::MatrixXd x = (m.subspace.basis * gaussian_matrix(2, 15, 10) * 50.0).colwise() + m.mean;
  const DataMatrix rec = reconstruct(m, DataMatrix(x));
  EXPECT_LT((rec.values - x).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Reconstruct, FullRankIsIdentity) {
  const FitModel m = fit_ae(DataMatrix(gaussian_matrix(5, 40, 12)), 5);
  const Eigen::MatrixXd x = gaussian_matrix(5, 20, 13) * 30.0;
  EXPECT_LT((reconstruct(m, DataMatrix(x)).values - x).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Reconstruct, ProjectorIsIdempotentAndSymmetric) {
  const FitModel m = fit_ae(DataMatrix(gaussian_matrix(9, 60, 14)), 3);
  const DataMatrix x(gaussian_matrix(9, 25, 15) * 10.0);
  const DataMatrix once = reconstruct(m, x);
  const DataMatrix twice = reconstruct(m, once);
  EXPECT_LT((twice.values - once.values).cwiseAbs().maxCoeff(), 1e-9);

  const Eigen::MatrixXd p = m.subspace.basis * m.subspace.basis.transpose();
  EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Theorem1, OrthogonalPairIsFlat) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd q = random_orthonormal(6, 2, seed);
    const PhiRange r = theorem1_range(q.col(0), q.col(1), 3600);
    EXPECT_LT(r.range(), 1e-12);
    EXPECT_NEAR(r.max, 1.0, 1e-12);
  }
}

TEST(Theorem1, PerturbedPairBoundedBySinXi) {
  const Eigen::MatrixXd q = random_orthonormal(5, 2, 3);
  double previous = -1.0;
  for (double xi : {0.01, 0.05, 0.1}) {
    // angle between the pair is pi/2 - xi
    const Eigen::VectorXd uj = std::sin(xi) * q.col(0) + std::cos(xi) * q.col(1);
    const PhiRange r = theorem1_range(q.col(0), uj, 3600);
    EXPECT_LE(r.range(), 2.0 * std::sin(xi) + 1e-9) << "xi " << xi;
    EXPECT_GT(r.range(), previous);
    previous = r.range();
  }
}

TEST(Theorem1, ParallelInputsRejected) {
  const Eigen::Vector3d u(0.0, 1.0, 0.0);
  EXPECT_THROW(theorem1_range(u, u, 100), Error);
  EXPECT_THROW(theorem1_range(u, Eigen::Vector3d(-u), 100), Error);
}
