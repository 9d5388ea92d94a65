#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcurve/parallel.hpp"
#include "lcurve/spline.hpp"
#include "lcurve/types.hpp"

namespace lcurve {

/// Categorical covariate entering the linear predictor with treatment
/// contrasts against `reference`.
struct FactorTerm {
  std::string name;  // an observation field: tuning, dataset, architecture, augmentation
  std::string reference;

  friend bool operator==(const FactorTerm&, const FactorTerm&) = default;
};

/// Cubic regression spline of ln(num_tr_images). With a non-empty `by`, one
/// centred smooth (with its own smoothing parameter) is fitted per level.
struct SmoothTerm {
  std::string by;
  int k = 5;

  std::string label() const;
  friend bool operator==(const SmoothTerm&, const SmoothTerm&) = default;
};

/// Log-spaced smoothing parameter candidates.
struct LambdaGrid {
  double log10_min = -4.0;
  double log10_max = 6.0;
  int points = 21;

  std::vector<double> values() const;
  friend bool operator==(const LambdaGrid&, const LambdaGrid&) = default;
};

struct ModelSpec {
  MetricKind response = MetricKind::ACC;
  std::vector<FactorTerm> factors;
  std::vector<SmoothTerm> smooths;
  double squeeze_eps = 1e-4;
  LambdaGrid lambda_grid;
  /// Skips the grid search. Either one value for every smooth block or one
  /// value per block.
  std::optional<std::vector<double>> fixed_lambdas;
  int max_iterations = 200;
  double tolerance = 1e-8;

  /// tuning (ref deep) + dataset (ref AU) + architecture (ref dnsNet121) +
  /// s(ln n) by dataset with 5 knots.
  static ModelSpec standard(MetricKind response);

  bool has_factor(const std::string& name) const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Levels of a factor as seen in the fitting data, reference first and the
/// remaining levels in lexical order.
struct FactorLevels {
  std::string name;
  std::vector<std::string> levels;
  int first_column = 0;  // column of levels[1]; levels.size() - 1 columns

  const std::string& reference() const { return levels.front(); }
  int columns() const { return static_cast<int>(levels.size()) - 1; }
};

/// One fitted smooth block: a centred cubic regression spline applied to the
/// rows of one level of the `by` factor (or all rows when `by` is empty).
struct SmoothBlock {
  std::string label;   // e.g. s(num_tr_images):datasetAU
  std::string term;    // e.g. s(num_tr_images):dataset
  std::string by;
  std::string level;
  KnotVector knots;
  Eigen::VectorXd constraint;  // column sums that were centred away
  Eigen::MatrixXd transform;   // k x (k-1), knot values = transform * coef
  Eigen::MatrixXd penalty;     // (k-1) x (k-1), already scaled
  double penalty_scale = 1.0;
  int first_column = 0;

  int rank() const { return static_cast<int>(transform.cols()); }
};

struct TermEdf {
  std::string label;
  double edf = 0.0;
  int ref_df = 0;
};

struct FitStats {
  double loglik = 0.0;
  double penalized_loglik = 0.0;
  double deviance = 0.0;
  double null_deviance = 0.0;
  double deviance_explained = 0.0;
  double adj_r_squared = 0.0;
  double aic = 0.0;
  double total_edf = 0.0;
  std::int64_t n_obs = 0;
};

struct FitDiagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<double> penalized_trace;  // accepted iterates, non-decreasing
};

/// Fitted Beta-family additive model with logit link.
struct AdditiveModel {
  MetricKind response = MetricKind::ACC;
  double squeeze_eps = 1e-4;
  std::vector<FactorLevels> factors;
  std::vector<SmoothTerm> smooth_terms;
  std::vector<SmoothBlock> smooths;
  std::vector<std::string> coefficient_labels;
  Eigen::VectorXd coefficients;  // intercept, factor contrasts, smooth blocks
  std::vector<double> lambdas;   // one per smooth block
  double phi = 1.0;
  Eigen::MatrixXd covariance;    // Bayesian posterior covariance of the coefficients
  std::vector<double> coefficient_edf;
  FitStats stats;
  FitDiagnostics diagnostics;
  std::int64_t min_observed_n = 0;
  std::int64_t max_observed_n = 0;

  int parametric_columns() const;
  /// Intercept and factor contrasts.
  Eigen::VectorXd theta() const;
  Eigen::VectorXd smooth_coefficients(std::size_t block) const;
  const FactorLevels* find_factor(const std::string& name) const;
};

/// Covariate values for prediction. Factors the model does not use are ignored.
struct Cell {
  std::map<std::string, std::string> factors;
  std::int64_t num_tr_images = 1;

  static Cell of(std::string tuning, std::string dataset, std::string architecture,
                 std::int64_t num_tr_images);
};

/// Maximum penalized likelihood fit. The observations are filtered to the
/// ModelSpec response metric; responses must already lie strictly inside (0, 1).
/// Without fixed lambdas each smooth's parameter is chosen on the grid by
/// coordinate-wise AIC search, evaluating the candidates of one coordinate
/// under `policy`.
AdditiveModel fit(const ModelSpec& spec, std::span<const MetricObservation> data,
                  Execution policy = Execution::parallel);

/// Linear predictor at a cell.
double linear_predictor(const AdditiveModel& model, const Cell& cell);

/// Mean response, inverse logit of the linear predictor.
double predict(const AdditiveModel& model, const Cell& cell);

/// Effective degrees of freedom per parametric factor and per smooth block.
std::vector<TermEdf> term_edf(const AdditiveModel& model);

/// Wald p-value. A coefficient label gets a two-sided normal test and a factor
/// name a joint chi-square over its contrasts. Smooth block and term labels use
/// a chi-square with df equal to the rounded EDF.
double wald_p(const AdditiveModel& model, const std::string& term);

struct EliminationStep {
  std::string term;
  double p_value = 0.0;
};

struct EliminationResult {
  AdditiveModel model;
  ModelSpec spec;
  std::vector<EliminationStep> dropped;
};

/// Backward stepwise elimination: refits after dropping the least significant
/// droppable term while its p-value exceeds alpha. A factor used as the `by`
/// variable of a retained smooth is not droppable.
EliminationResult backward_eliminate(const ModelSpec& full_spec,
                                     std::span<const MetricObservation> data,
                                     double alpha = 0.05,
                                     Execution policy = Execution::parallel);

struct ResponseFitStats {
  double deviance_explained = 0.0;
  double adj_r_squared = 0.0;
};

/// Recomputes deviance explained and adjusted R^2 of a fitted model on data.
ResponseFitStats fit_stats(const AdditiveModel& model, std::span<const MetricObservation> data);

}  // namespace lcurve
