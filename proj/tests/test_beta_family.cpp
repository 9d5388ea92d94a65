#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lcurve/beta_family.hpp"
#include "lcurve/error.hpp"

using namespace lcurve;

TEST(Squeeze, ClampsBoundaries) {
  EXPECT_EQ(squeeze(0.0, 1e-4), 1e-4);
  EXPECT_EQ(squeeze(0.97, 1e-4), 0.97);
  EXPECT_EQ(squeeze(1.0, 1e-4), 1.0 - 1e-4);
  EXPECT_THROW(squeeze(0.5, 0.0), InputError);
  EXPECT_THROW(squeeze(0.5, 0.5), InputError);
  EXPECT_THROW(squeeze(1.2, 1e-4), InputError);
}

TEST(BetaLogLik, UniformDensity) {
  for (double y : {0.01, 0.3, 0.77}) EXPECT_NEAR(beta_loglik(y, 0.5, 2.0).value, 0.0, 1e-12);
}

TEST(BetaLogLik, BetaTwoTwoAtHalf) {
  EXPECT_NEAR(beta_loglik(0.5, 0.5, 4.0).value, std::log(1.5), 1e-12);
}

TEST(BetaLogLik, MatchesClosedFormDensity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int i = 0; i < 50; ++i) {
    const double y = u(rng);
    const double mu = u(rng);
    const double phi = 0.5 + 50 * u(rng);
    const double a = mu * phi;
    const double b = (1 - mu) * phi;
    const double want = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1) * std::log(y) +
                        (b - 1) * std::log(1 - y);
    EXPECT_NEAR(beta_loglik(y, mu, phi).value, want, 1e-9 * (1 + std::abs(want)));
  }
}

TEST(BetaLogLik, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double h = 1e-6;
  for (int i = 0; i < 40; ++i) {
    const double y = u(rng);
    const double eta = logit(u(rng));
    const double rho = std::log(1 + 100 * u(rng));
    const auto f = [&](double e, double r) {
      return beta_loglik(y, inverse_logit(e).mu, std::exp(r)).value;
    };
    const auto g = beta_loglik(y, inverse_logit(eta).mu, std::exp(rho));
    const double fd_eta = (f(eta + h, rho) - f(eta - h, rho)) / (2 * h);
    const double fd_rho = (f(eta, rho + h) - f(eta, rho - h)) / (2 * h);
    EXPECT_NEAR(g.d_logit_mu, fd_eta, 1e-6 * std::max(1.0, std::abs(fd_eta)));
    EXPECT_NEAR(g.d_log_phi, fd_rho, 1e-6 * std::max(1.0, std::abs(fd_rho)));
  }
}

TEST(BetaLogLik, RejectsBoundary) {
  EXPECT_THROW(beta_loglik(0.0, 0.5, 2.0), InputError);
  EXPECT_THROW(beta_loglik(1.0, 0.5, 2.0), InputError);
  EXPECT_THROW(beta_loglik(0.5, 0.5, 0.0), InputError);
}

TEST(GroupTerms, EqualSumOfObservationTerms) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  BetaGroupStats st;
  std::vector<double> ys;
  for (int i = 0; i < 12; ++i) {
    const double y = u(rng);
    ys.push_back(y);
    st.count += 1;
    st.sum_log_y += std::log(y);
    st.sum_log_1my += std::log1p(-y);
  }
  const double eta = 0.8;
  const double rho = std::log(30.0);
  double total = 0, d_eta = 0, d_rho = 0;
  for (double y : ys) {
    const auto t = beta_loglik(y, inverse_logit(eta).mu, std::exp(rho));
    total += t.value;
    d_eta += t.d_logit_mu;
    d_rho += t.d_log_phi;
  }
  const auto g = beta_group_terms(st, eta, rho, true);
  EXPECT_NEAR(g.value, total, 1e-9);
  EXPECT_NEAR(g.d_eta, d_eta, 1e-9);
  EXPECT_NEAR(g.d_rho, d_rho, 1e-9);
  EXPECT_NEAR(beta_group_loglik(st, eta, rho), total, 1e-9);

  const double h = 1e-5;
  const auto fe = [&](double e) { return beta_group_terms(st, e, rho, false).d_eta; };
  const auto fr = [&](double r) { return beta_group_terms(st, eta, r, false).d_rho; };
  EXPECT_NEAR(g.observed_eta, (fe(eta + h) - fe(eta - h)) / (2 * h), 1e-5 * (1 + std::abs(g.observed_eta)));
  EXPECT_NEAR(g.observed_rho, (fr(rho + h) - fr(rho - h)) / (2 * h), 1e-5 * (1 + std::abs(g.observed_rho)));
  EXPECT_GT(g.fisher_eta, 0.0);
  EXPECT_GT(g.fisher_rho, 0.0);
}

TEST(Saturated, DominatesEveryMean) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 30; ++i) {
    const double y = u(rng);
    const double phi = 1 + 200 * u(rng);
    const double sat = beta_saturated_loglik(y, phi);
    for (int j = 1; j < 200; ++j) {
      ASSERT_LE(beta_loglik(y, j / 200.0, phi).value, sat + 1e-9);
    }
  }
}
