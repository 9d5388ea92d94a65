#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace lcurve {

/// Strictly increasing knot locations on the covariate axis.
struct KnotVector {
  std::vector<double> knots;

  std::size_t size() const { return knots.size(); }
  double front() const { return knots.front(); }
  double back() const { return knots.back(); }

  friend bool operator==(const KnotVector&, const KnotVector&) = default;
};

/// k knots at even rank quantiles j/(k-1) of the distinct values, with linear
/// interpolation between neighbouring values. The input is sorted and
/// de-duplicated first. Throws InputError for k < 3 or fewer than two
/// distinct finite values.
KnotVector place_knots(std::span<const double> distinct_values, int k);

/// Cubic regression spline parameterised by its values at the knots
/// (cardinal basis) with natural end conditions. Outside the boundary knots
/// the spline continues linearly.
class CubicRegressionSpline {
 public:
  explicit CubicRegressionSpline(KnotVector knots);

  const KnotVector& knots() const { return knots_; }
  int size() const { return static_cast<int>(knots_.size()); }

  /// Basis functions evaluated at x, written into out (length size()).
  void basis_row(double x, std::span<double> out) const;
  Eigen::RowVectorXd basis_row(double x) const;

  /// Integrated squared second derivative: coef' * penalty * coef.
  const Eigen::MatrixXd& penalty() const { return penalty_; }

  /// Maps knot values to knot second derivatives (zero rows at both ends).
  const Eigen::MatrixXd& second_derivative_map() const { return f_; }

  double value(const Eigen::VectorXd& coef, double x) const;

 private:
  KnotVector knots_;
  std::vector<double> h_;
  Eigen::MatrixXd f_;
  Eigen::MatrixXd penalty_;
};

/// Evaluated basis plus penalty for one smooth. `transform` maps the
/// coefficients of this (possibly constrained) basis back to knot values:
/// knot_values = transform * coef. It is the identity before centering.
struct SmoothBasis {
  KnotVector knots;
  Eigen::MatrixXd basis_matrix;  // n_obs x rank
  Eigen::MatrixXd penalty;       // rank x rank
  Eigen::MatrixXd transform;     // k x rank
  std::string covariate_name;

  int rank() const { return static_cast<int>(basis_matrix.cols()); }
};

/// Throws InputError for non-finite x.
SmoothBasis build_basis(std::span<const double> x, const KnotVector& knots,
                        std::string covariate_name = "log_num_tr_images");

/// Orthonormal k x (k-1) matrix whose columns span the vectors orthogonal to
/// `column_sums` (Householder reflection of the constraint).
Eigen::MatrixXd sum_to_zero_transform(const Eigen::VectorXd& column_sums);

/// Imposes the sum-to-zero-over-x constraint, dropping the rank by one and
/// transforming the penalty congruently. A basis whose columns already sum to
/// zero is returned unchanged.
SmoothBasis center_basis(const SmoothBasis& basis, std::span<const double> x);

}  // namespace lcurve
