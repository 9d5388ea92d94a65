#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lcurve/error.hpp"
#include "lcurve/spline.hpp"

using namespace lcurve;

namespace {

std::vector<double> ladder_logs() {
  std::vector<double> v;
  for (double n : {10, 20, 50, 150, 500, 1000}) v.push_back(std::log(n));
  return v;
}

}  // namespace

TEST(PlaceKnots, LadderRankQuantiles) {
  const auto x = ladder_logs();
  const auto k = place_knots(x, 5);
  ASSERT_EQ(k.size(), 5u);
  EXPECT_NEAR(k.knots[0], std::log(10.0), 1e-12);
  EXPECT_NEAR(k.knots[4], std::log(1000.0), 1e-12);
  EXPECT_NEAR(k.knots[2], 0.5 * (std::log(50.0) + std::log(150.0)), 1e-12);
  EXPECT_NEAR(k.knots[1], std::log(20.0) + 0.25 * (std::log(50.0) - std::log(20.0)), 1e-12);
  EXPECT_NEAR(k.knots[3], std::log(150.0) + 0.75 * (std::log(500.0) - std::log(150.0)), 1e-12);
}

TEST(PlaceKnots, TwoValues) {
  const std::vector<double> x = {0.0, 1.0};
  EXPECT_EQ(place_knots(x, 3).knots, (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(PlaceKnots, Rejections) {
  const auto x = ladder_logs();
  EXPECT_THROW(place_knots(x, 2), InputError);
  const std::vector<double> one = {1.0, 1.0, 1.0};
  EXPECT_THROW(place_knots(one, 3), InputError);
}

TEST(Basis, CardinalAtKnots) {
  const auto knots = place_knots(ladder_logs(), 5);
  const auto b = build_basis(knots.knots, knots);
  EXPECT_TRUE(b.basis_matrix.isApprox(Eigen::MatrixXd::Identity(5, 5), 1e-12));
  EXPECT_LT((b.basis_matrix - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Basis, RejectsNonFinite) {
  const auto knots = place_knots(ladder_logs(), 5);
  const std::vector<double> x = {2.5, std::nan("")};
  EXPECT_THROW(build_basis(x, knots), InputError);
}

TEST(Penalty, SymmetricPsdWithAffineNullSpace) {
  const auto knots = place_knots(ladder_logs(), 5);
  const CubicRegressionSpline s(knots);
  const Eigen::MatrixXd& S = s.penalty();
  EXPECT_LT((S - S.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  Eigen::VectorXd affine(5);
  for (int j = 0; j < 5; ++j) affine(j) = 0.7 - 1.3 * knots.knots[static_cast<std::size_t>(j)];
  EXPECT_NEAR(affine.dot(S * affine), 0.0, 1e-10);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(5);
  for (int j = 0; j < 5; ++j) c(j) = nd(rng);
  EXPECT_NEAR((c + affine).dot(S * (c + affine)), c.dot(S * c), 1e-9 * (1 + c.dot(S * c)));
}

TEST(Penalty, MatchesTrapezoidIntegratedSecondDerivative) {
  const auto knots = place_knots(ladder_logs(), 5);
  const CubicRegressionSpline s(knots);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd c(5);
    for (int j = 0; j < 5; ++j) c(j) = nd(rng);
    const double a = knots.front();
    const double b = knots.back();
    const int n = 10000;
    const double dx = (b - a) / n;
    const double h = 1e-4;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
      double x = a + i * dx;
      x = std::clamp(x, a + h, b - h);
      const double f2 = (s.value(c, x + h) - 2 * s.value(c, x) + s.value(c, x - h)) / (h * h);
      integral += (i == 0 || i == n ? 0.5 : 1.0) * f2 * f2 * dx;
    }
    const double quad = c.dot(s.penalty() * c);
    EXPECT_NEAR(quad, integral, 1e-6 * integral) << "trial " << trial;
  }
}

TEST(Spline, ContinuousThroughSecondDerivativeAtKnots) {
  const auto knots = place_knots(ladder_logs(), 5);
  const CubicRegressionSpline s(knots);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(5);
  for (int j = 0; j < 5; ++j) c(j) = nd(rng);
  const double h = 1e-3;
  const auto d1 = [&](double x) { return (s.value(c, x + h) - s.value(c, x - h)) / (2 * h); };
  const auto d2 = [&](double x) { return (s.value(c, x + h) - 2 * s.value(c, x) + s.value(c, x - h)) / (h * h); };
  for (std::size_t j = 1; j + 1 < knots.size(); ++j) {
    const double t = knots.knots[j];
    const double eps = 3e-3;
    EXPECT_NEAR(s.value(c, t - 1e-9), s.value(c, t + 1e-9), 1e-6);
    EXPECT_NEAR(d1(t - eps), d1(t + eps), 0.05 * (1 + std::abs(d1(t))));
    EXPECT_NEAR(d2(t - eps), d2(t + eps), 0.05 * (1 + std::abs(d2(t))));
  }
}

TEST(Spline, LinearBeyondBoundary) {
  const auto knots = place_knots(ladder_logs(), 5);
  const CubicRegressionSpline s(knots);
  Eigen::VectorXd c(5);
  c << 0.3, -0.2, 0.5, 0.1, 0.9;
  const double b = knots.back();
  const double slope = s.value(c, b + 1) - s.value(c, b);
  EXPECT_NEAR(s.value(c, b + 3) - s.value(c, b + 2), slope, 1e-10);
  const double a = knots.front();
  EXPECT_NEAR(s.value(c, a - 2) - s.value(c, a - 3), s.value(c, a) - s.value(c, a - 1), 1e-10);
}

TEST(Centering, ColumnsSumToZeroAndRankDrops) {
  std::vector<double> x;
  for (int rep = 0; rep < 7; ++rep) {
    for (double v : ladder_logs()) x.push_back(v);
  }
  const auto knots = place_knots(ladder_logs(), 5);
  const auto centred = center_basis(build_basis(x, knots), x);
  EXPECT_EQ(centred.rank(), 4);
  EXPECT_LT(centred.basis_matrix.colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
  // congruent penalty
  const auto raw = build_basis(x, knots);
  EXPECT_LT((centred.penalty - centred.transform.transpose() * raw.penalty * centred.transform)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Centering, ConstantsProjectToZero) {
  std::vector<double> x = ladder_logs();
  const auto knots = place_knots(x, 5);
  const auto centred = center_basis(build_basis(x, knots), x);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(x.size()), 2.5);
  const Eigen::VectorXd coef = centred.basis_matrix.colPivHouseholderQr().solve(y);
  // least squares of a constant on zero-sum columns is the zero vector
  EXPECT_LT(coef.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Centering, Idempotent) {
  std::vector<double> x = ladder_logs();
  const auto knots = place_knots(x, 5);
  const auto once = center_basis(build_basis(x, knots), x);
  const auto twice = center_basis(once, x);
  EXPECT_EQ(twice.rank(), once.rank());
  EXPECT_TRUE(twice.basis_matrix.isApprox(once.basis_matrix));
  EXPECT_TRUE(twice.penalty.isApprox(once.penalty));
}

TEST(Basis, BitReproducible) {
  std::vector<double> x = {2.4, 3.3, 4.4, 5.0, 6.1, 6.9, 7.5};
  const auto knots = place_knots(ladder_logs(), 5);
  const auto a = center_basis(build_basis(x, knots), x);
  const auto b = center_basis(build_basis(x, knots), x);
  EXPECT_EQ(a.basis_matrix, b.basis_matrix);
  EXPECT_EQ(a.penalty, b.penalty);
}
