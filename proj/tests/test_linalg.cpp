#include <gtest/gtest.h>

#include <numbers>

#include "angemb/linalg.hpp"
#include "angemb/synth.hpp"
#include "test_support.hpp"

using namespace angemb;
using namespace angemb::testing;

namespace {

Eigen::MatrixXd cols(std::initializer_list<std::initializer_list<double>> columns) {
  const Index n = static_cast<Index>(columns.size());
  const Index D = static_cast<Index>(columns.begin()->size());
  Eigen::MatrixXd m(D, n);
  Index j = 0;
  for (const auto& c : columns) {
    Index i = 0;
    for (double v : c) m(i++, j) = v;
    ++j;
  }
  return m;
}

}  // namespace

TEST(Center, TwoSamplesOneFeature) {
  auto [mean, xc] = center(DataMatrix(cols({{1.0}, {3.0}})));
  ASSERT_EQ(mean.size(), 1);
  EXPECT_DOUBLE_EQ(mean[0], 2.0);
  EXPECT_DOUBLE_EQ(xc.values(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(xc.values(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(xc.mean[0], 2.0);
}

TEST(Center, AlreadyZeroMeanIsIdentity) {
  Eigen::MatrixXd x = gaussian_matrix(4, 30, 3);
  x.colwise() -= Eigen::VectorXd(x.rowwise().mean());
  auto [mean, xc] = center(DataMatrix(x));
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((xc.values - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Center, MatchesNaiveTwoPassMean) {
  const Eigen::MatrixXd x = gaussian_matrix(5, 40, 11) * 7.0;
  auto [mean, xc] = center(DataMatrix(x));
  for (Index i = 0; i < x.rows(); ++i) {
    long double sum = 0.0L;
    for (Index j = 0; j < x.cols(); ++j) sum += x(i, j);
    const double naive = static_cast<double>(sum / x.cols());
    EXPECT_NEAR(mean[i], naive, 1e-13);
    EXPECT_LT(std::abs(xc.values.row(i).sum()), 1e-9);
  }
}

TEST(Center, RejectsNonFiniteWithLocation) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 4);
  x(1, 2) = std::numeric_limits<double>::quiet_NaN();
  try {
    center(DataMatrix(x));
    FAIL() << "expected InvalidData";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidData);
    EXPECT_NE(std::string(e.what()).find("row 1, col 2"), std::string::npos);
  }
  x(1, 2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(center(DataMatrix(x)), Error);
}

TEST(NormalizeColumns, ScalesToUnitNorm) {
  const SphereData s = normalize_columns(cols({{3.0, 4.0}, {1.0, 0.0}}));
  EXPECT_DOUBLE_EQ(s.units(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(s.units(1, 0), 0.8);
  EXPECT_DOUBLE_EQ(s.units(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.units(1, 1), 0.0);
  EXPECT_TRUE(s.dropped.empty());
}

TEST(NormalizeColumns, DropsZeroNormColumns) {
  const SphereData s = normalize_columns(cols({{0.0, 0.0}, {0.0, 2.0}}), 1e-12);
  ASSERT_EQ(s.m(), 1);
  EXPECT_DOUBLE_EQ(s.units(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(s.units(1, 0), 1.0);
  EXPECT_EQ(s.dropped, IndexList{0});
  EXPECT_EQ(s.source_n, 2);
  EXPECT_EQ(s.kept(), IndexList{1});
}

TEST(NormalizeColumns, AllDroppedThrows) {
  try {
    normalize_columns(Eigen::MatrixXd::Zero(3, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyAfterNormalization);
  }
}

TEST(NormalizeColumns, InvariantsOnRandomData) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd x = gaussian_matrix(6, 25, seed) * (1.0 + static_cast<double>(seed));
    x.col(static_cast<Index>(seed % 25)).setZero();
    x.col(static_cast<Index>((seed * 7 + 3) % 25)).setZero();
    const SphereData s = normalize_columns(x);
    EXPECT_EQ(s.m() + static_cast<Index>(s.dropped.size()), s.source_n);
    for (std::size_t k = 1; k < s.dropped.size(); ++k) EXPECT_LT(s.dropped[k - 1], s.dropped[k]);
    for (Index j = 0; j < s.m(); ++j) EXPECT_NEAR(s.units.col(j).norm(), 1.0, 1e-12);
  }
}

TEST(DominantSubspace, AxisAlignedUnits) {
  const Eigen::MatrixXd u = cols({{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}});
  for (Strategy s : {Strategy::DPath, Strategy::NPath, Strategy::Auto}) {
    const Subspace q = dominant_subspace(u, 1, s);
    EXPECT_NEAR(q.basis(0, 0), 1.0, 1e-12) << to_string(s);
    EXPECT_NEAR(q.basis(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(q.eigenvalues[0], 2.0, 1e-12);
  }
}

TEST(DominantSubspace, FullRankSpansEverything) {
  const Eigen::MatrixXd u = unit_columns(6, 6, 5);
  for (Strategy s : {Strategy::DPath, Strategy::NPath}) {
    const Subspace q = dominant_subspace(u, 6, s);
    const Eigen::MatrixXd p = q.basis * q.basis.transpose();
    EXPECT_LT((p - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DominantSubspace, GramPathsAgree) {
  const Eigen::MatrixXd u = unit_columns(20, 200, 2024);
  const Subspace dp = dominant_subspace(u, 3, Strategy::DPath);
  const Subspace np = dominant_subspace(u, 3, Strategy::NPath);
  EXPECT_LT(max_principal_angle(dp, np), 1e-8);
  EXPECT_LT((dp.eigenvalues - np.eigenvalues).cwiseAbs().maxCoeff(), 1e-9);
}

// Property: random full-rank shapes, both paths, every returned subspace valid.
TEST(DominantSubspace, PropertyPathsOrthonormalCanonicalOptimal) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 25; ++trial) {
    const Index D = std::uniform_int_distribution<Index>(2, 30)(gen);
    const Index m = std::uniform_int_distribution<Index>(2, 30)(gen);
    const Index d = std::uniform_int_distribution<Index>(1, std::min(D, m))(gen);
    const Eigen::MatrixXd u = unit_columns(D, m, gen());
    const Subspace dp = dominant_subspace(u, d, Strategy::DPath);
    const Subspace np = dominant_subspace(u, d, Strategy::NPath);

    // independent oracle: squared singular values of U
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(u).singularValues();
    const double top = sv.head(d).squaredNorm();
    for (const Subspace* q : {&dp, &np}) {
      EXPECT_NO_THROW(expect_orthonormal(q->basis));
      EXPECT_TRUE(sign_canonical(q->basis));
      for (Index i = 1; i < d; ++i) EXPECT_GE(q->eigenvalues[i - 1], q->eigenvalues[i]);
      EXPECT_GE(q->eigenvalues.minCoeff(), -1e-12);
      const double trace = (q->basis.transpose() * u).squaredNorm();
      EXPECT_NEAR(trace, top, 1e-10 * top);
    }
    // tied or near-tied spectra make the split ill-defined; only compare with a clear gap
    const double gap = d < std::min(D, m) ? sv[d - 1] * sv[d - 1] - sv[d] * sv[d] : 1.0;
    if (gap > 1e-3) EXPECT_LT(max_principal_angle(dp, np), 1e-8) << D << "x" << m << " d=" << d;
  }
}

TEST(DominantSubspace, RankErrors) {
  const Eigen::MatrixXd u = unit_columns(4, 6, 1);
  for (Index d : {Index{0}, Index{5}, Index{-1}}) {
    try {
      dominant_subspace(u, d);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidRank);
    }
  }
  // all columns on one line: n-path finds a single nonzero eigenvalue
  Eigen::MatrixXd line = Eigen::MatrixXd::Zero(5, 3);
  line(0, 0) = 1.0;
  line(0, 1) = -1.0;
  line(0, 2) = 1.0;
  try {
    dominant_subspace(line, 2, Strategy::NPath);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(DominantSubspace, AutoStrategyResolution) {
  EXPECT_EQ(resolve_strategy(10, 100, 2, Strategy::Auto), Strategy::DPath);
  EXPECT_EQ(resolve_strategy(10, 10, 2, Strategy::Auto), Strategy::DPath);
  EXPECT_EQ(resolve_strategy(100, 10, 2, Strategy::Auto), Strategy::NPath);
  EXPECT_EQ(resolve_strategy(20480, 633, 5, Strategy::Auto), Strategy::NPath);
  EXPECT_EQ(resolve_strategy(2000, 1500, 5, Strategy::Auto), Strategy::Randomized);
  EXPECT_EQ(resolve_strategy(2000, 1500, 151, Strategy::Auto), Strategy::NPath);
  EXPECT_EQ(resolve_strategy(1024, 5000, 5, Strategy::Auto), Strategy::DPath);
  EXPECT_EQ(resolve_strategy(10, 100, 2, Strategy::NPath), Strategy::NPath);
}

TEST(RandomizedRange, ExactRankThree) {
  const Eigen::MatrixXd basis = random_orthonormal(50, 3, 8);
  Eigen::MatrixXd u = basis * gaussian_matrix(3, 100, 9);
  u.colwise().normalize();
  const Subspace q = randomized_range(u, 3, 10, 2, 123);
  EXPECT_LT(principal_angles(q.basis, basis).maxCoeff(), 1e-10);
}

TEST(RandomizedRange, MatchesExactOnDominantDirection) {
  // inliers along one line plus 10% orthogonal outliers, as in the robustness preset but wider
  SynthSpec spec = canonical_robustness_spec();
  spec.D = 40;
  spec.true_basis = random_orthonormal_basis(40, 1, 42);
  const SynthResult res = generate(spec);
  auto [mean, xc] = center(res.data);
  const SphereData u = normalize_columns(xc);
  const Subspace exact = dominant_subspace(u, 1, Strategy::DPath);
  const Subspace fast = randomized_range(u, 1, 10, 2, 7);
  EXPECT_LT(max_principal_angle(exact, fast), 1e-6);
}

TEST(RandomizedRange, DeterministicPerSeed) {
  const Eigen::MatrixXd u = unit_columns(60, 80, 10);
  const Subspace a = randomized_range(u, 4, 10, 2, 99);
  const Subspace b = randomized_range(u, 4, 10, 2, 99);
  EXPECT_EQ(a.basis, b.basis);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_TRUE(sign_canonical(a.basis));
  EXPECT_NO_THROW(expect_orthonormal(a.basis));
}

TEST(RandomizedRange, RecoversWithSpectralGap) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Index D = 80, m = 120, d = 4;
    const Eigen::MatrixXd left = random_orthonormal(D, 8, gen());
    const Eigen::MatrixXd right = random_orthonormal(m, 8, gen());
    Eigen::VectorXd s(8);
    s << 10, 9, 8, 7, 2, 1.5, 1.2, 1.0;  // (7/2)^2 > 10
    const Eigen::MatrixXd u = left * s.asDiagonal() * right.transpose();
    const Subspace exact = dominant_subspace(u, d, Strategy::DPath);
    const Subspace fast = randomized_range(u, d, 10, 2, gen());
    EXPECT_LT(max_principal_angle(exact, fast), 1e-6);
  }
}

TEST(RandomizedRange, SketchTooWide) {
  const Eigen::MatrixXd u = unit_columns(12, 30, 2);
  try {
    randomized_range(u, 3, 10, 2, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidRank);
  }
  EXPECT_NO_THROW(randomized_range(u, 2, 10, 2, 0));
}

TEST(PrincipalAngles, IdentityAndOrthogonal) {
  const Eigen::MatrixXd q = random_orthonormal(7, 3, 1);
  EXPECT_LT(principal_angles(q, q).maxCoeff(), 1e-10);

  const Eigen::MatrixXd e1 = Eigen::MatrixXd::Identity(3, 3).col(0);
  const Eigen::MatrixXd e2 = Eigen::MatrixXd::Identity(3, 3).col(1);
  EXPECT_NEAR(principal_angles(e1, e2)[0], std::numbers::pi / 2, 1e-15);
}

TEST(PrincipalAngles, RotationWithinPlane) {
  const Eigen::MatrixXd q1 = random_orthonormal(9, 2, 3);
  for (double t : {0.1, 1.0, 2.5}) {
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    EXPECT_LT(principal_angles(q1, q1 * r).maxCoeff(), 1e-8);
  }
}

TEST(PrincipalAngles, ResolvesTinyAngles) {
  const Eigen::MatrixXd q = random_orthonormal(6, 2, 4);
  const Eigen::VectorXd g = gaussian_matrix(6, 1, 5).col(0);
  Eigen::VectorXd w = g - q * (q.transpose() * g);
  w.normalize();
  const double t = 1e-9;
  Eigen::MatrixXd q2 = q;
  q2.col(1) = std::cos(t) * q.col(1) + std::sin(t) * w;
  const Eigen::VectorXd a = principal_angles(q, q2);
  EXPECT_NEAR(a[1], t, 1e-12);
  EXPECT_LT(a[0], 1e-12);
}

TEST(PrincipalAngles, SortedAndBounded) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::VectorXd a = principal_angles(random_orthonormal(10, 4, seed), random_orthonormal(10, 4, seed + 100));
    for (Index i = 0; i < a.size(); ++i) {
      EXPECT_GE(a[i], 0.0);
      EXPECT_LE(a[i], std::numbers::pi / 2);
      if (i) EXPECT_LE(a[i - 1], a[i]);
    }
  }
}

TEST(PrincipalAngles, DimensionMismatch) {
  try {
    principal_angles(random_orthonormal(5, 2, 0), random_orthonormal(5, 3, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidData);
  }
  EXPECT_THROW(principal_angles(random_orthonormal(5, 2, 0), random_orthonormal(6, 2, 0)), Error);
}

TEST(SignCanon, LargestMagnitudePositiveFirstTie) {
  Eigen::MatrixXd m(3, 2);
  m << 0.1, 0.5, -0.9, -0.5, 0.2, 0.0;
  canonicalize_signs(m);
  EXPECT_DOUBLE_EQ(m(1, 0), 0.9);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.5);  // tie between rows 0 and 1: row 0 wins
  EXPECT_DOUBLE_EQ(m(1, 1), -0.5);
}
