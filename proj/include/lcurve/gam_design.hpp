#pragma once

// Grouped model matrix and the penalized Beta objective.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "lcurve/beta_family.hpp"
#include "lcurve/gam.hpp"

namespace lcurve {

/// Observations collapsed to unique model-matrix rows. Because the Beta log
/// likelihood depends on the responses only through sum(log y) and
/// sum(log(1 - y)), the grouped objective equals the per-observation one.
struct GroupedDesign {
  std::vector<FactorLevels> factors;
  std::vector<SmoothTerm> smooth_terms;
  std::vector<SmoothBlock> smooths;
  std::vector<std::string> labels;
  Eigen::MatrixXd x;                          // groups x coefficients
  std::vector<BetaGroupStats> stats;          // per group
  std::vector<std::vector<double>> responses; // per group, ascending
  Eigen::VectorXd sum_y;
  Eigen::VectorXd sum_y2;
  std::int64_t n_obs = 0;
  std::int64_t min_n = 0;
  std::int64_t max_n = 0;

  int coefficients() const { return static_cast<int>(x.cols()); }
  int groups() const { return static_cast<int>(x.rows()); }

  /// Block-diagonal sum of lambda_b * S_b embedded in coefficient space.
  Eigen::MatrixXd penalty(std::span<const double> lambdas) const;
};

/// Builds the grouped design for the ModelSpec response metric. Level problems
/// throw InputError naming the term; boundary responses also throw.
GroupedDesign build_grouped_design(const ModelSpec& spec,
                                   std::span<const MetricObservation> data);

/// Model-matrix row of a cell; throws InputError for unknown levels.
Eigen::RowVectorXd model_row(const std::vector<FactorLevels>& factors,
                             const std::vector<SmoothBlock>& smooths, int columns,
                             const Cell& cell);

/// Penalized log likelihood sum_g loglik_g - 0.5 beta' S_lambda beta and,
/// when requested, its exact gradient in (beta, log phi) (length p + 1).
double penalized_objective(const GroupedDesign& design, std::span<const double> lambdas,
                           const Eigen::VectorXd& beta, double log_phi,
                           Eigen::VectorXd* gradient = nullptr);

/// Expands a ModelSpec lambda setting to one value per smooth block.
std::vector<double> expand_lambdas(const std::vector<double>& values, std::size_t blocks);

}  // namespace lcurve
