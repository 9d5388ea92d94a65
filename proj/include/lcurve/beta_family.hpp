#pragma once

namespace lcurve {

/// Clamps y into [eps, 1 - eps]. Throws InputError unless 0 < eps < 0.5 and
/// y lies in [0, 1].
double squeeze(double y, double eps);

/// Log density of Beta(mu * phi, (1 - mu) * phi) at y together with its exact
/// gradient in (logit mu, log phi).
struct BetaLogLik {
  double value = 0.0;
  double d_logit_mu = 0.0;
  double d_log_phi = 0.0;
};

/// Throws InputError when y, mu are not strictly inside (0, 1) or phi <= 0.
BetaLogLik beta_loglik(double y, double mu, double phi);

/// Inverse logit, split into mu and 1 - mu so neither side loses precision.
struct MeanPair {
  double mu;
  double one_minus_mu;
};
MeanPair inverse_logit(double eta);

double logit(double p);

/// Sufficient statistics of a set of observations sharing one mean. The Beta
/// log likelihood depends on the responses only through these sums.
struct BetaGroupStats {
  double count = 0.0;
  double sum_log_y = 0.0;
  double sum_log_1my = 0.0;
};

/// Log likelihood of a group and its derivatives in the linear predictor eta
/// and rho = log phi. `observed_eta` and friends are exact second derivatives;
/// `fisher_eta` and `fisher_rho` are the expected information.
struct BetaGroupTerms {
  double value = 0.0;
  double d_eta = 0.0;
  double d_rho = 0.0;
  double observed_eta = 0.0;
  double observed_eta_rho = 0.0;
  double observed_rho = 0.0;
  double fisher_eta = 0.0;
  double fisher_rho = 0.0;
};

BetaGroupTerms beta_group_terms(const BetaGroupStats& stats, double eta, double rho,
                                bool with_second_order);

/// Log likelihood only (no derivatives).
double beta_group_loglik(const BetaGroupStats& stats, double eta, double rho);

/// Largest log likelihood of a single observation y at fixed phi, attained at
/// the mean whose digamma difference matches logit(y). Used as the saturated
/// reference of the Beta deviance.
double beta_saturated_loglik(double y, double phi);

}  // namespace lcurve
