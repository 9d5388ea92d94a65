#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "lcurve/beta_family.hpp"
#include "lcurve/error.hpp"
#include "lcurve/gam.hpp"
#include "lcurve/gam_fit_detail.hpp"

namespace lcurve {

namespace {

double normal_two_sided_p(double estimate, double se) {
  if (!(se > 0.0)) return estimate == 0.0 ? 1.0 : 0.0;
  const double z = std::abs(estimate / se);
  return boost::math::erfc(z / std::sqrt(2.0));
}

double chi_square_upper(double statistic, double df) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

/// beta' V^+ beta using the `rank` leading eigenpairs of V.
double truncated_quadratic(const Eigen::VectorXd& beta, const Eigen::MatrixXd& v, int rank) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * beta;
  const Eigen::Index n = v.rows();
  double stat = 0.0;
  for (int i = 0; i < rank && i < n; ++i) {
    const Eigen::Index idx = n - 1 - i;  // eigenvalues ascend
    const double ev = eig.eigenvalues()(idx);
    if (ev > 0.0) stat += proj(idx) * proj(idx) / ev;
  }
  return stat;
}

struct Selection {
  std::vector<int> columns;
  int df = 0;
  bool smooth = false;
};

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& cols) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(cols[i]);
  return out;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  const auto n = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(cols[i], cols[j]);
  }
  return out;
}

double block_edf(const AdditiveModel& model, const SmoothBlock& blk) {
  double edf = 0.0;
  for (int j = 0; j < blk.rank(); ++j) {
    edf += model.coefficient_edf[static_cast<std::size_t>(blk.first_column + j)];
  }
  return edf;
}

int rounded_df(double edf, int rank) {
  return std::clamp(static_cast<int>(std::lround(edf)), 1, rank);
}

Cell cell_of(const AdditiveModel& model, const MetricObservation& obs) {
  Cell cell;
  cell.num_tr_images = obs.num_tr_images;
  for (const auto& f : model.factors) cell.factors[f.name] = obs.field(f.name);
  for (const auto& blk : model.smooths) {
    if (!blk.by.empty()) cell.factors[blk.by] = obs.field(blk.by);
  }
  return cell;
}

}  // namespace

std::vector<TermEdf> term_edf(const AdditiveModel& model) {
  std::vector<TermEdf> out;
  for (const auto& f : model.factors) {
    TermEdf row;
    row.label = f.name;
    row.ref_df = f.columns();
    for (int j = 0; j < f.columns(); ++j) {
      row.edf += model.coefficient_edf[static_cast<std::size_t>(f.first_column + j)];
    }
    out.push_back(row);
  }
  for (const auto& blk : model.smooths) {
    out.push_back({blk.label, block_edf(model, blk), blk.rank()});
  }
  return out;
}

double wald_p(const AdditiveModel& model, const std::string& term) {
  Selection sel;
  const auto& labels = model.coefficient_labels;
  if (auto it = std::find(labels.begin(), labels.end(), term); it != labels.end()) {
    const int j = static_cast<int>(it - labels.begin());
    return normal_two_sided_p(model.coefficients(j), std::sqrt(std::max(0.0, model.covariance(j, j))));
  }
  if (const FactorLevels* f = model.find_factor(term)) {
    if (f->columns() == 0) return 1.0;
    for (int j = 0; j < f->columns(); ++j) sel.columns.push_back(f->first_column + j);
    sel.df = f->columns();
  } else {
    for (const auto& blk : model.smooths) {
      if (blk.label != term && blk.term != term) continue;
      for (int j = 0; j < blk.rank(); ++j) sel.columns.push_back(blk.first_column + j);
      sel.df += rounded_df(block_edf(model, blk), blk.rank());
      sel.smooth = true;
    }
  }
  if (sel.columns.empty()) throw InputError("term '" + term + "' is not in the model");

  const Eigen::VectorXd beta = gather(model.coefficients, sel.columns);
  const Eigen::MatrixXd v = gather(model.covariance, sel.columns);
  if (sel.columns.size() == 1) {
    return normal_two_sided_p(beta(0), std::sqrt(std::max(0.0, v(0, 0))));
  }
  double stat = 0.0;
  if (sel.smooth) {
    stat = truncated_quadratic(beta, v, sel.df);
  } else {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
    stat = beta.dot(ldlt.solve(beta));
  }
  return chi_square_upper(stat, sel.df);
}

EliminationResult backward_eliminate(const ModelSpec& full_spec,
                                     std::span<const MetricObservation> data, double alpha,
                                     Execution policy) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");

  const auto describe = [](const ModelSpec& spec) {
    std::string out = "[";
    for (const auto& f : spec.factors) out += f.name + " ";
    for (const auto& s : spec.smooths) out += s.label() + " ";
    if (out.size() > 1) out.pop_back();
    return out + "]";
  };
  const auto refit = [&](const ModelSpec& spec) {
    try {
      return fit(spec, data, policy);
    } catch (const Error& e) {
      const std::string msg = "fit failed for spec " + describe(spec) + ": " + e.what();
      if (e.kind() == ErrorKind::numerical) throw NumericalError(msg);
      throw InputError(msg);
    }
  };

  EliminationResult result;
  result.spec = full_spec;
  result.model = refit(result.spec);

  while (true) {
    std::string worst;
    double worst_p = -1.0;
    bool worst_is_smooth = false;
    for (const auto& f : result.spec.factors) {
      const bool required = std::any_of(result.spec.smooths.begin(), result.spec.smooths.end(),
                                        [&](const SmoothTerm& s) { return s.by == f.name; });
      if (required) continue;
      const double p = wald_p(result.model, f.name);
      if (p > worst_p) {
        worst_p = p;
        worst = f.name;
        worst_is_smooth = false;
      }
    }
    for (const auto& s : result.spec.smooths) {
      const double p = wald_p(result.model, s.label());
      if (p > worst_p) {
        worst_p = p;
        worst = s.label();
        worst_is_smooth = true;
      }
    }
    if (worst.empty() || !(worst_p > alpha)) break;

    ModelSpec reduced = result.spec;
    if (worst_is_smooth) {
      if (reduced.fixed_lambdas && reduced.fixed_lambdas->size() > 1) {
        std::vector<double> kept;
        for (std::size_t b = 0; b < result.model.smooths.size(); ++b) {
          if (result.model.smooths[b].term != worst) kept.push_back((*reduced.fixed_lambdas)[b]);
        }
        reduced.fixed_lambdas = kept.empty() ? std::nullopt : std::optional(kept);
      }
      std::erase_if(reduced.smooths, [&](const SmoothTerm& s) { return s.label() == worst; });
    } else {
      std::erase_if(reduced.factors, [&](const FactorTerm& f) { return f.name == worst; });
    }
    result.dropped.push_back({worst, worst_p});
    result.model = refit(reduced);
    result.spec = std::move(reduced);
  }
  return result;
}

ResponseFitStats fit_stats(const AdditiveModel& model, std::span<const MetricObservation> data) {
  double loglik = 0.0;
  double saturated = 0.0;
  double rss = 0.0;
  double sy = 0.0;
  double sy2 = 0.0;
  BetaGroupStats pooled;
  for (const auto& obs : data) {
    if (obs.metric_kind != model.response) continue;
    const double y = squeeze(obs.value, model.squeeze_eps);
    const double mu = predict(model, cell_of(model, obs));
    loglik += beta_loglik(y, mu, model.phi).value;
    saturated += beta_saturated_loglik(y, model.phi);
    rss += (y - mu) * (y - mu);
    sy += y;
    sy2 += y * y;
    pooled.count += 1.0;
    pooled.sum_log_y += std::log(y);
    pooled.sum_log_1my += std::log1p(-y);
  }
  if (pooled.count == 0.0) throw InputError("no observations for the model's response metric");

  GroupedDesign single;
  single.stats = {pooled};
  single.sum_y = Eigen::VectorXd::Constant(1, sy);
  single.n_obs = static_cast<std::int64_t>(pooled.count);
  const double null_ll = detail::null_loglik(single, std::log(model.phi));

  const double n = pooled.count;
  const double deviance = std::max(0.0, 2.0 * (saturated - loglik));
  const double null_deviance = std::max(0.0, 2.0 * (saturated - null_ll));
  ResponseFitStats out;
  out.deviance_explained =
      null_deviance > 1e-7 * std::max({1.0, n, std::abs(saturated)}) ? 1.0 - deviance / null_deviance : 0.0;
  out.adj_r_squared = detail::adjusted_r_squared(rss, sy2 - sy * sy / n, n, model.stats.total_edf);
  return out;
}

}  // namespace lcurve
