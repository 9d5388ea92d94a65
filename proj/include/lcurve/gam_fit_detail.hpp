#pragma once

// Fitting engine internals, exposed for tests and benchmarks.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "lcurve/gam_design.hpp"

namespace lcurve::detail {

struct FitState {
  Eigen::VectorXd beta;
  double rho = 0.0;  // log phi
  double pll = 0.0;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

struct Inference {
  Eigen::MatrixXd covariance;
  std::vector<double> coefficient_edf;
  double total_edf = 0.0;
  double aic = 0.0;
};

/// Weighted least squares on the logit of the group means, precision from
/// the method of moments.
FitState initial_state(const GroupedDesign& design);

/// Penalized Newton iterations with step halving at fixed lambdas. Throws
/// NumericalError when the objective stops increasing away from a stationary
/// point or the iteration budget is exhausted.
FitState newton_fit(const GroupedDesign& design, std::span<const double> lambdas,
                    const FitState& start, int max_iterations, double tolerance);

/// Posterior covariance (X'WX + S)^-1 with the EDF and AIC it implies.
Inference infer(const GroupedDesign& design, std::span<const double> lambdas,
                const FitState& state);

/// Log likelihood of the best intercept-only model at fixed log phi.
double null_loglik(const GroupedDesign& design, double rho);

void fill_response_stats(const GroupedDesign& design, const FitState& state,
                         const Inference& inference, FitStats& stats);

double adjusted_r_squared(double rss, double tss, double n, double edf);

}  // namespace lcurve::detail
