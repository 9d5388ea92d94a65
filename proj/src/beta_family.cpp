#include "lcurve/beta_family.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>

#include "lcurve/error.hpp"

namespace lcurve {

namespace {

// boost::math::lgamma is reentrant, unlike the C library's (signgam).
inline double log_gamma(double x) { return boost::math::lgamma(x); }
inline double digamma(double x) { return boost::math::digamma(x); }
inline double trigamma(double x) { return boost::math::trigamma(x); }

}  // namespace

double squeeze(double y, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InputError("squeeze eps must lie in (0, 0.5)");
  if (!(y >= 0.0 && y <= 1.0)) throw InputError("squeeze expects a ratio in [0, 1]");
  return std::min(std::max(y, eps), 1.0 - eps);
}

MeanPair inverse_logit(double eta) {
  if (eta >= 0.0) {
    const double e = std::exp(-eta);
    return {1.0 / (1.0 + e), e / (1.0 + e)};
  }
  const double e = std::exp(eta);
  return {e / (1.0 + e), 1.0 / (1.0 + e)};
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

BetaLogLik beta_loglik(double y, double mu, double phi) {
  if (!(y > 0.0 && y < 1.0)) {
    throw InputError("beta log likelihood needs y strictly inside (0, 1); squeeze first");
  }
  if (!(mu > 0.0 && mu < 1.0)) throw InputError("beta mean must lie strictly inside (0, 1)");
  if (!(phi > 0.0) || !std::isfinite(phi)) throw InputError("beta precision must be positive");

  const BetaGroupStats stats{1.0, std::log(y), std::log1p(-y)};
  const BetaGroupTerms t = beta_group_terms(stats, logit(mu), std::log(phi), false);
  return {t.value, t.d_eta, t.d_rho};
}

BetaGroupTerms beta_group_terms(const BetaGroupStats& s, double eta, double rho,
                                bool with_second_order) {
  const auto [mu, nu] = inverse_logit(eta);
  const double phi = std::exp(rho);
  const double a = mu * phi;
  const double b = nu * phi;
  const double m = s.count;

  const double psi_a = digamma(a);
  const double psi_b = digamma(b);
  const double psi_phi = digamma(phi);

  BetaGroupTerms t;
  t.value = m * (log_gamma(phi) - log_gamma(a) - log_gamma(b)) + (a - 1.0) * s.sum_log_y +
            (b - 1.0) * s.sum_log_1my;

  // r = d loglik / d mu divided by phi.
  const double r = m * (psi_b - psi_a) + s.sum_log_y - s.sum_log_1my;
  const double dmu_deta = mu * nu;
  t.d_eta = phi * dmu_deta * r;

  const double d_phi =
      m * (psi_phi - mu * psi_a - nu * psi_b) + mu * s.sum_log_y + nu * s.sum_log_1my;
  t.d_rho = phi * d_phi;

  if (!with_second_order) return t;

  const double tri_a = trigamma(a);
  const double tri_b = trigamma(b);
  const double tri_phi = trigamma(phi);

  t.fisher_eta = m * phi * phi * (tri_a + tri_b) * dmu_deta * dmu_deta;
  t.observed_eta = (nu - mu) * dmu_deta * phi * r - t.fisher_eta;

  const double dr_dphi = m * (nu * tri_b - mu * tri_a);
  t.observed_eta_rho = phi * dmu_deta * (r + phi * dr_dphi);

  const double d2_phi = m * (tri_phi - mu * mu * tri_a - nu * nu * tri_b);
  t.observed_rho = phi * phi * d2_phi + phi * d_phi;
  t.fisher_rho = -phi * phi * d2_phi;
  return t;
}

double beta_group_loglik(const BetaGroupStats& s, double eta, double rho) {
  const auto [mu, nu] = inverse_logit(eta);
  const double phi = std::exp(rho);
  const double a = mu * phi;
  const double b = nu * phi;
  return s.count * (log_gamma(phi) - log_gamma(a) - log_gamma(b)) + (a - 1.0) * s.sum_log_y +
         (b - 1.0) * s.sum_log_1my;
}

double beta_saturated_loglik(double y, double phi) {
  const double target = logit(y);
  const double rho = std::log(phi);
  const BetaGroupStats stats{1.0, std::log(y), std::log1p(-y)};

  // psi(mu phi) - psi((1 - mu) phi) is increasing in eta; solve for the root
  // with safeguarded Newton inside a bracket.
  double lo = -60.0;
  double hi = 60.0;
  double eta = target;
  for (int iter = 0; iter < 200; ++iter) {
    const auto [mu, nu] = inverse_logit(eta);
    const double g = digamma(mu * phi) - digamma(nu * phi) - target;
    if (g > 0.0) {
      hi = eta;
    } else {
      lo = eta;
    }
    const double slope = phi * mu * nu * (trigamma(mu * phi) + trigamma(nu * phi));
    double next = eta - g / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - eta) <= 1e-13 * (1.0 + std::abs(eta))) {
      eta = next;
      break;
    }
    eta = next;
  }
  return beta_group_loglik(stats, eta, rho);
}

}  // namespace lcurve
