#include "lcurve/gam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lcurve/error.hpp"
#include "lcurve/gam_design.hpp"
#include "lcurve/gam_fit_detail.hpp"

namespace lcurve {

namespace {

const double kMinLogPhi = std::log(1e-3);
const double kMaxLogPhi = std::log(1e8);

}  // namespace

std::vector<double> LambdaGrid::values() const {
  if (points < 1) throw InputError("lambda grid needs at least one point");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double e = points == 1 ? log10_min
                                 : log10_min + (log10_max - log10_min) * i / (points - 1);
    out.push_back(std::pow(10.0, e));
  }
  return out;
}

ModelSpec ModelSpec::standard(MetricKind response) {
  ModelSpec spec;
  spec.response = response;
  spec.factors = {{"tuning", "deep"}, {"dataset", "AU"}, {"architecture", "dnsNet121"}};
  spec.smooths = {{"dataset", 5}};
  return spec;
}

bool ModelSpec::has_factor(const std::string& name) const {
  return std::any_of(factors.begin(), factors.end(),
                     [&](const FactorTerm& f) { return f.name == name; });
}

int AdditiveModel::parametric_columns() const {
  return smooths.empty() ? static_cast<int>(coefficients.size()) : smooths.front().first_column;
}

Eigen::VectorXd AdditiveModel::theta() const { return coefficients.head(parametric_columns()); }

Eigen::VectorXd AdditiveModel::smooth_coefficients(std::size_t block) const {
  const auto& blk = smooths.at(block);
  return coefficients.segment(blk.first_column, blk.rank());
}

const FactorLevels* AdditiveModel::find_factor(const std::string& name) const {
  for (const auto& f : factors) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

Cell Cell::of(std::string tuning, std::string dataset, std::string architecture,
              std::int64_t num_tr_images) {
  Cell c;
  c.factors["tuning"] = std::move(tuning);
  c.factors["dataset"] = std::move(dataset);
  c.factors["architecture"] = std::move(architecture);
  c.num_tr_images = num_tr_images;
  return c;
}

namespace detail {

FitState initial_state(const GroupedDesign& design) {
  const int p = design.coefficients();
  const int groups = design.groups();
  Eigen::VectorXd z(groups);
  Eigen::VectorXd w(groups);
  for (int g = 0; g < groups; ++g) {
    const double m = design.stats[static_cast<std::size_t>(g)].count;
    const double ybar = std::clamp(design.sum_y(g) / m, 1e-6, 1.0 - 1e-6);
    z(g) = logit(ybar);
    w(g) = m;
  }
  Eigen::MatrixXd lhs = design.x.transpose() * w.asDiagonal() * design.x;
  lhs.diagonal().array() += 1e-8 * std::max(1.0, lhs.diagonal().maxCoeff());
  FitState state;
  state.beta = lhs.ldlt().solve(design.x.transpose() * w.asDiagonal() * z);
  if (!state.beta.allFinite()) state.beta = Eigen::VectorXd::Zero(p);

  const Eigen::VectorXd eta = design.x * state.beta;
  double rss = 0.0;
  double mv = 0.0;
  for (int g = 0; g < groups; ++g) {
    const auto [mu, nu] = inverse_logit(eta(g));
    const double m = design.stats[static_cast<std::size_t>(g)].count;
    rss += design.sum_y2(g) - 2.0 * mu * design.sum_y(g) + m * mu * mu;
    mv += m * mu * nu;
  }
  const double n = static_cast<double>(design.n_obs);
  const double var = std::max(rss / n, 0.0);
  double phi = var > 0.0 ? (mv / n) / var - 1.0 : 1e6;
  phi = std::clamp(phi, 1.0, 1e6);
  state.rho = std::log(phi);
  return state;
}

FitState newton_fit(const GroupedDesign& design, std::span<const double> lambdas,
                    const FitState& start, int max_iterations, double tolerance) {
  const int p = design.coefficients();
  const int groups = design.groups();
  const Eigen::MatrixXd s = design.penalty(lambdas);

  FitState state = start;
  state.rho = std::clamp(state.rho, kMinLogPhi, kMaxLogPhi);
  state.pll = penalized_objective(design, lambdas, state.beta, state.rho);
  if (!std::isfinite(state.pll)) {
    state = initial_state(design);
    state.pll = penalized_objective(design, lambdas, state.beta, state.rho);
  }
  state.iterations = 0;
  state.converged = false;
  state.trace.assign(1, state.pll);

  double last_change = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iterations; ++iter) {
    const Eigen::VectorXd eta = design.x * state.beta;
    Eigen::VectorXd d_eta(groups), obs_eta(groups), obs_cross(groups), fisher(groups);
    double g_rho = 0.0;
    double h_rho = 0.0;
    double f_rho = 0.0;
    for (int g = 0; g < groups; ++g) {
      const BetaGroupTerms t =
          beta_group_terms(design.stats[static_cast<std::size_t>(g)], eta(g), state.rho, true);
      d_eta(g) = t.d_eta;
      obs_eta(g) = t.observed_eta;
      obs_cross(g) = t.observed_eta_rho;
      fisher(g) = t.fisher_eta;
      g_rho += t.d_rho;
      h_rho += t.observed_rho;
      f_rho += t.fisher_rho;
    }

    const bool rho_free = !((state.rho >= kMaxLogPhi - 1e-12 && g_rho > 0.0) ||
                            (state.rho <= kMinLogPhi + 1e-12 && g_rho < 0.0));
    const int dim = rho_free ? p + 1 : p;
    Eigen::VectorXd grad(dim);
    grad.head(p) = design.x.transpose() * d_eta - s * state.beta;
    if (rho_free) grad(p) = g_rho;

    // Newton with the observed information; Fisher scoring when that is not
    // positive definite.
    Eigen::MatrixXd info(dim, dim);
    info.topLeftCorner(p, p) = design.x.transpose() * (-obs_eta).asDiagonal() * design.x + s;
    if (rho_free) {
      info.topRightCorner(p, 1) = -(design.x.transpose() * obs_cross);
      info.bottomLeftCorner(1, p) = info.topRightCorner(p, 1).transpose();
      info(p, p) = -h_rho;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
      info.setZero();
      info.topLeftCorner(p, p) = design.x.transpose() * fisher.asDiagonal() * design.x + s;
      if (rho_free) info(p, p) = f_rho;
      llt.compute(info);
    }
    Eigen::VectorXd step;
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    } else {
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
      step = ldlt.solve(grad);
    }
    if (!step.allFinite()) {
      throw NumericalError("penalized IRLS produced a non-finite step at iteration " +
                           std::to_string(iter));
    }
    const double predicted = grad.dot(step);

    bool accepted = false;
    FitState trial = state;
    double scale = 1.0;
    for (int half = 0; half < 60; ++half, scale *= 0.5) {
      trial.beta = state.beta + scale * step.head(p);
      trial.rho = rho_free ? std::clamp(state.rho + scale * step(p), kMinLogPhi, kMaxLogPhi)
                           : state.rho;
      trial.pll = penalized_objective(design, lambdas, trial.beta, trial.rho);
      if (std::isfinite(trial.pll) && trial.pll >= state.pll) {
        accepted = true;
        break;
      }
    }

    state.iterations = iter;
    if (!accepted) {
      // No ascent left at working precision.
      if (std::abs(predicted) <= 1e-7 * (1.0 + std::abs(state.pll))) {
        state.converged = true;
        break;
      }
      std::ostringstream msg;
      msg << "penalized likelihood could not be increased at iteration " << iter
          << " (objective " << state.pll << ", predicted gain " << 0.5 * predicted << ")";
      throw NumericalError(msg.str());
    }

    last_change = trial.pll - state.pll;
    trial.trace = std::move(state.trace);
    trial.iterations = iter;
    state = std::move(trial);
    state.trace.push_back(state.pll);
    if (last_change < tolerance && std::abs(predicted) <= 1e-4 * (1.0 + std::abs(state.pll))) {
      state.converged = true;
      break;
    }
  }

  if (!state.converged) {
    std::ostringstream msg;
    msg << "beta GAM fit did not converge in " << max_iterations
        << " iterations (last objective change " << last_change << ", objective " << state.pll
        << ")";
    throw NumericalError(msg.str());
  }
  state.loglik = 0.0;
  const Eigen::VectorXd eta = design.x * state.beta;
  for (int g = 0; g < groups; ++g) {
    state.loglik += beta_group_loglik(design.stats[static_cast<std::size_t>(g)], eta(g), state.rho);
  }
  return state;
}

Inference infer(const GroupedDesign& design, std::span<const double> lambdas,
                const FitState& state) {
  const int groups = design.groups();
  const Eigen::VectorXd eta = design.x * state.beta;
  Eigen::VectorXd w(groups);
  for (int g = 0; g < groups; ++g) {
    w(g) = beta_group_terms(design.stats[static_cast<std::size_t>(g)], eta(g), state.rho, true)
               .fisher_eta;
  }
  const Eigen::MatrixXd a = design.x.transpose() * w.asDiagonal() * design.x;
  Eigen::MatrixXd h = a + design.penalty(lambdas);
  h = 0.5 * (h + h.transpose()).eval();

  Inference out;
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() == Eigen::Success) {
    out.covariance = llt.solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
  } else {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    Eigen::VectorXd inv = ev.unaryExpr([&](double v) { return v > cutoff ? 1.0 / v : 0.0; });
    out.covariance = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  }
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  const Eigen::MatrixXd influence = out.covariance * a;
  const Eigen::VectorXd diag = influence.diagonal();
  out.coefficient_edf.assign(diag.data(), diag.data() + diag.size());
  out.total_edf = influence.trace();
  out.aic = -2.0 * state.loglik + 2.0 * (out.total_edf + 1.0);
  return out;
}

double null_loglik(const GroupedDesign& design, double rho) {
  double total_y = 0.0;
  for (int g = 0; g < design.groups(); ++g) total_y += design.sum_y(g);
  double eta = logit(std::clamp(total_y / static_cast<double>(design.n_obs), 1e-9, 1.0 - 1e-9));

  const auto value = [&](double e) {
    double v = 0.0;
    for (const auto& st : design.stats) v += beta_group_loglik(st, e, rho);
    return v;
  };
  double current = value(eta);
  for (int iter = 0; iter < 200; ++iter) {
    double grad = 0.0;
    double info = 0.0;
    for (const auto& st : design.stats) {
      const BetaGroupTerms t = beta_group_terms(st, eta, rho, true);
      grad += t.d_eta;
      info += t.fisher_eta;
    }
    if (!(info > 0.0)) break;
    double step = grad / info;
    bool moved = false;
    for (int half = 0; half < 60; ++half, step *= 0.5) {
      const double candidate = value(eta + step);
      if (candidate >= current) {
        moved = candidate - current > 0.0;
        eta += step;
        current = candidate;
        break;
      }
    }
    if (!moved || std::abs(step) < 1e-12) break;
  }
  return current;
}

void fill_response_stats(const GroupedDesign& design, const FitState& state,
                         const Inference& inference, FitStats& stats) {
  const double phi = std::exp(state.rho);
  double saturated = 0.0;
  for (const auto& values : design.responses) {
    for (double y : values) saturated += beta_saturated_loglik(y, phi);
  }
  const double n = static_cast<double>(design.n_obs);
  stats.n_obs = design.n_obs;
  stats.loglik = state.loglik;
  stats.penalized_loglik = state.pll;
  stats.total_edf = inference.total_edf;
  stats.aic = inference.aic;
  stats.deviance = std::max(0.0, 2.0 * (saturated - state.loglik));
  stats.null_deviance = std::max(0.0, 2.0 * (saturated - null_loglik(design, state.rho)));
  stats.deviance_explained = stats.null_deviance > 1e-7 * std::max({1.0, n, std::abs(saturated)})
                                 ? 1.0 - stats.deviance / stats.null_deviance
                                 : 0.0;

  const Eigen::VectorXd eta = design.x * state.beta;
  double rss = 0.0;
  double sy = 0.0;
  double sy2 = 0.0;
  for (int g = 0; g < design.groups(); ++g) {
    const double mu = inverse_logit(eta(g)).mu;
    const double m = design.stats[static_cast<std::size_t>(g)].count;
    rss += design.sum_y2(g) - 2.0 * mu * design.sum_y(g) + m * mu * mu;
    sy += design.sum_y(g);
    sy2 += design.sum_y2(g);
  }
  const double tss = sy2 - sy * sy / n;
  stats.adj_r_squared = adjusted_r_squared(std::max(rss, 0.0), tss, n, inference.total_edf);
}

double adjusted_r_squared(double rss, double tss, double n, double edf) {
  if (!(tss > 1e-14 * std::max(1.0, n))) return 0.0;
  const double resid_df = n - edf;
  if (resid_df <= 0.0 || n <= 1.0) return 1.0 - rss / tss;
  return 1.0 - (rss / resid_df) / (tss / (n - 1.0));
}

struct Candidate {
  FitState state;
  Inference inference;
  bool ok = false;
};

}  // namespace detail

namespace {

bool lexicographically_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

AdditiveModel assemble(const ModelSpec& spec, const GroupedDesign& design,
                       const std::vector<double>& lambdas, const detail::FitState& state,
                       const detail::Inference& inference) {
  AdditiveModel model;
  model.response = spec.response;
  model.squeeze_eps = spec.squeeze_eps;
  model.factors = design.factors;
  model.smooth_terms = design.smooth_terms;
  model.smooths = design.smooths;
  model.coefficient_labels = design.labels;
  model.coefficients = state.beta;
  model.lambdas = lambdas;
  model.phi = std::exp(state.rho);
  model.covariance = inference.covariance;
  model.coefficient_edf = inference.coefficient_edf;
  model.min_observed_n = design.min_n;
  model.max_observed_n = design.max_n;
  model.diagnostics.iterations = state.iterations;
  model.diagnostics.converged = state.converged;
  model.diagnostics.penalized_trace = state.trace;
  detail::fill_response_stats(design, state, inference, model.stats);
  return model;
}

}  // namespace

AdditiveModel fit(const ModelSpec& spec, std::span<const MetricObservation> data,
                  Execution policy) {
  const GroupedDesign design = build_grouped_design(spec, data);
  const std::size_t blocks = design.smooths.size();

  if (spec.fixed_lambdas || blocks == 0) {
    const std::vector<double> lambdas =
        blocks == 0 ? std::vector<double>{} : expand_lambdas(*spec.fixed_lambdas, blocks);
    const detail::FitState state = detail::newton_fit(
        design, lambdas, detail::initial_state(design), spec.max_iterations, spec.tolerance);
    return assemble(spec, design, lambdas, state, detail::infer(design, lambdas, state));
  }

  const std::vector<double> grid = spec.lambda_grid.values();
  std::vector<std::size_t> chosen(blocks, grid.size() / 2);
  const auto lambdas_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = grid[idx[i]];
    return out;
  };

  detail::FitState best = detail::newton_fit(design, lambdas_of(chosen),
                                             detail::initial_state(design),
                                             spec.max_iterations, spec.tolerance);
  detail::Inference best_inf = detail::infer(design, lambdas_of(chosen), best);

  // Coordinate-wise AIC search. Every candidate of a coordinate starts from the
  // same incumbent, and ties resolve on the lambda vector, so the outcome does
  // not depend on the evaluation schedule.
  for (int sweep = 0; sweep < 20; ++sweep) {
    bool changed = false;
    for (std::size_t b = 0; b < blocks; ++b) {
      std::vector<detail::Candidate> candidates(grid.size());
      for_each_index(policy, grid.size(), [&](std::size_t j) {
        std::vector<std::size_t> idx = chosen;
        idx[b] = j;
        const std::vector<double> lambdas = lambdas_of(idx);
        try {
          candidates[j].state =
              detail::newton_fit(design, lambdas, best, spec.max_iterations, spec.tolerance);
          candidates[j].inference = detail::infer(design, lambdas, candidates[j].state);
          candidates[j].ok = std::isfinite(candidates[j].inference.aic);
        } catch (const NumericalError&) {
          candidates[j].ok = false;
        }
      });

      std::size_t pick = grid.size();
      for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!candidates[j].ok) continue;
        if (pick == grid.size()) {
          pick = j;
          continue;
        }
        const double a = candidates[j].inference.aic;
        const double c = candidates[pick].inference.aic;
        std::vector<std::size_t> ij = chosen, ip = chosen;
        ij[b] = j;
        ip[b] = pick;
        if (a < c || (a == c && lexicographically_less(lambdas_of(ij), lambdas_of(ip)))) pick = j;
      }
      if (pick == grid.size()) {
        throw NumericalError("no smoothing parameter candidate converged for smooth " +
                             design.smooths[b].label);
      }
      if (pick != chosen[b]) changed = true;
      chosen[b] = pick;
      best = std::move(candidates[pick].state);
      best_inf = std::move(candidates[pick].inference);
    }
    if (!changed) break;
  }
  return assemble(spec, design, lambdas_of(chosen), best, best_inf);
}

double linear_predictor(const AdditiveModel& model, const Cell& cell) {
  const Eigen::RowVectorXd row = model_row(model.factors, model.smooths,
                                           static_cast<int>(model.coefficients.size()), cell);
  return row.dot(model.coefficients);
}

double predict(const AdditiveModel& model, const Cell& cell) {
  return inverse_logit(linear_predictor(model, cell)).mu;
}

}  // namespace lcurve
