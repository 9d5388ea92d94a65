#include "lcurve/spline.hpp"

#include <algorithm>
#include <cmath>

#include "lcurve/error.hpp"

namespace lcurve {

KnotVector place_knots(std::span<const double> distinct_values, int k) {
  if (k < 3) throw InputError("knot count must be at least 3, got " + std::to_string(k));
  std::vector<double> v(distinct_values.begin(), distinct_values.end());
  for (double x : v) {
    if (!std::isfinite(x)) throw InputError("knot placement needs finite covariate values");
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() < 2) throw InputError("knot placement needs at least 2 distinct covariate values");

  const double last_rank = static_cast<double>(v.size() - 1);
  KnotVector out;
  out.knots.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double rank = last_rank * j / (k - 1);
    const auto lo = std::min(static_cast<std::size_t>(std::floor(rank)), v.size() - 2);
    const double frac = rank - static_cast<double>(lo);
    out.knots.push_back(v[lo] + frac * (v[lo + 1] - v[lo]));
  }
  out.knots.front() = v.front();
  out.knots.back() = v.back();
  return out;
}

CubicRegressionSpline::CubicRegressionSpline(KnotVector knots) : knots_(std::move(knots)) {
  const int k = size();
  if (k < 3) throw InputError("a cubic regression spline needs at least 3 knots");
  for (int j = 0; j + 1 < k; ++j) {
    const double h = knots_.knots[j + 1] - knots_.knots[j];
    if (!(h > 0.0)) throw InputError("knots must be strictly increasing");
    h_.push_back(h);
  }

  // D maps knot values to second divided differences, B is the tridiagonal
  // continuity system for interior second derivatives: B * gamma = D * beta.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k - 2, k);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k - 2, k - 2);
  for (int i = 0; i < k - 2; ++i) {
    d(i, i) = 1.0 / h_[i];
    d(i, i + 1) = -1.0 / h_[i] - 1.0 / h_[i + 1];
    d(i, i + 2) = 1.0 / h_[i + 1];
    b(i, i) = (h_[i] + h_[i + 1]) / 3.0;
    if (i + 1 < k - 2) {
      b(i, i + 1) = h_[i + 1] / 6.0;
      b(i + 1, i) = h_[i + 1] / 6.0;
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(b);
  const Eigen::MatrixXd binv_d = llt.solve(d);

  f_ = Eigen::MatrixXd::Zero(k, k);
  f_.middleRows(1, k - 2) = binv_d;
  penalty_ = d.transpose() * binv_d;
  penalty_ = 0.5 * (penalty_ + penalty_.transpose()).eval();
}

void CubicRegressionSpline::basis_row(double x, std::span<double> out) const {
  const int k = size();
  const auto& t = knots_.knots;
  std::fill(out.begin(), out.end(), 0.0);

  if (x < t.front()) {
    // f(t0) + f'(t0) (x - t0), with f''(t0) = 0.
    const double h = h_[0];
    const double dx = x - t.front();
    out[0] += 1.0 - dx / h;
    out[1] += dx / h;
    for (int j = 0; j < k; ++j) out[j] -= dx * h * f_(1, j) / 6.0;
    return;
  }
  if (x > t.back()) {
    const double h = h_[k - 2];
    const double dx = x - t.back();
    out[k - 1] += 1.0 + dx / h;
    out[k - 2] -= dx / h;
    for (int j = 0; j < k; ++j) out[j] += dx * h * f_(k - 2, j) / 6.0;
    return;
  }

  int seg = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  seg = std::clamp(seg, 0, k - 2);
  const double h = h_[seg];
  const double right = t[seg + 1] - x;
  const double left = x - t[seg];
  const double c_lo = (right * right * right / h - h * right) / 6.0;
  const double c_hi = (left * left * left / h - h * left) / 6.0;
  out[seg] += right / h;
  out[seg + 1] += left / h;
  for (int j = 0; j < k; ++j) out[j] += c_lo * f_(seg, j) + c_hi * f_(seg + 1, j);
}

Eigen::RowVectorXd CubicRegressionSpline::basis_row(double x) const {
  Eigen::RowVectorXd row(size());
  basis_row(x, std::span<double>(row.data(), static_cast<std::size_t>(row.size())));
  return row;
}

double CubicRegressionSpline::value(const Eigen::VectorXd& coef, double x) const {
  return basis_row(x).dot(coef);
}

SmoothBasis build_basis(std::span<const double> x, const KnotVector& knots,
                        std::string covariate_name) {
  const CubicRegressionSpline spline(knots);
  const int k = spline.size();
  SmoothBasis out;
  out.knots = knots;
  out.covariate_name = std::move(covariate_name);
  out.basis_matrix.resize(static_cast<Eigen::Index>(x.size()), k);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw InputError("basis evaluation needs finite covariate values");
    out.basis_matrix.row(static_cast<Eigen::Index>(i)) = spline.basis_row(x[i]);
  }
  out.penalty = spline.penalty();
  out.transform = Eigen::MatrixXd::Identity(k, k);
  return out;
}

Eigen::MatrixXd sum_to_zero_transform(const Eigen::VectorXd& column_sums) {
  const Eigen::Index k = column_sums.size();
  Eigen::VectorXd v = column_sums;
  const double norm = column_sums.norm();
  v(0) += (column_sums(0) >= 0.0 ? norm : -norm);
  const Eigen::MatrixXd reflect =
      Eigen::MatrixXd::Identity(k, k) - 2.0 * v * v.transpose() / v.squaredNorm();
  return reflect.rightCols(k - 1);
}

SmoothBasis center_basis(const SmoothBasis& basis, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != basis.basis_matrix.rows()) {
    throw InputError("centering data does not match the basis rows");
  }
  const Eigen::VectorXd sums = basis.basis_matrix.colwise().sum().transpose();
  const double scale = std::max(1.0, basis.basis_matrix.cwiseAbs().sum());
  if (sums.norm() <= 1e-12 * scale) return basis;

  const Eigen::MatrixXd z = sum_to_zero_transform(sums);
  SmoothBasis out;
  out.knots = basis.knots;
  out.covariate_name = basis.covariate_name;
  out.basis_matrix = basis.basis_matrix * z;
  out.penalty = z.transpose() * basis.penalty * z;
  out.penalty = 0.5 * (out.penalty + out.penalty.transpose()).eval();
  out.transform = basis.transform * z;
  return out;
}

}  // namespace lcurve
