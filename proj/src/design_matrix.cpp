#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lcurve/error.hpp"
#include "lcurve/gam_design.hpp"

namespace lcurve {

namespace {

constexpr const char* kSmoothCovariate = "num_tr_images";

bool is_factor_field(const std::string& name) {
  return name == "tuning" || name == "dataset" || name == "architecture" ||
         name == "augmentation" || name == "class";
}

int level_index(const std::vector<std::string>& levels, const std::string& value) {
  auto it = std::find(levels.begin(), levels.end(), value);
  return it == levels.end() ? -1 : static_cast<int>(it - levels.begin());
}

int matrix_rank(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

}  // namespace

std::string SmoothTerm::label() const {
  std::string out = std::string("s(") + kSmoothCovariate + ")";
  if (!by.empty()) out += ":" + by;
  return out;
}

std::vector<double> expand_lambdas(const std::vector<double>& values, std::size_t blocks) {
  if (values.size() == 1) return std::vector<double>(blocks, values.front());
  if (values.size() != blocks) {
    throw InputError("expected 1 or " + std::to_string(blocks) + " smoothing parameters, got " +
                     std::to_string(values.size()));
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("smoothing parameters must be >= 0");
  }
  return values;
}

Eigen::MatrixXd GroupedDesign::penalty(std::span<const double> lambdas) const {
  const int p = coefficients();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t b = 0; b < smooths.size(); ++b) {
    const auto& blk = smooths[b];
    s.block(blk.first_column, blk.first_column, blk.rank(), blk.rank()) += lambdas[b] * blk.penalty;
  }
  return s;
}

Eigen::RowVectorXd model_row(const std::vector<FactorLevels>& factors,
                             const std::vector<SmoothBlock>& smooths, int columns,
                             const Cell& cell) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(columns);
  row(0) = 1.0;

  const auto lookup = [&](const std::string& name) -> const std::string& {
    auto it = cell.factors.find(name);
    if (it == cell.factors.end()) {
      throw InputError("cell does not specify factor '" + name + "' required by the model");
    }
    return it->second;
  };

  for (const auto& f : factors) {
    const int idx = level_index(f.levels, lookup(f.name));
    if (idx < 0) {
      throw InputError("unknown level '" + lookup(f.name) + "' for factor '" + f.name + "'");
    }
    if (idx > 0) row(f.first_column + idx - 1) = 1.0;
  }

  if (cell.num_tr_images <= 0) throw InputError("num_tr_images must be positive");
  const double x = std::log(static_cast<double>(cell.num_tr_images));

  std::map<std::string, bool> by_level_known;
  for (const auto& blk : smooths) {
    if (!blk.by.empty()) {
      const std::string& value = lookup(blk.by);
      by_level_known[blk.by] = by_level_known[blk.by] || value == blk.level;
      if (value != blk.level) continue;
    }
    const CubicRegressionSpline spline(blk.knots);
    row.segment(blk.first_column, blk.rank()) = spline.basis_row(x) * blk.transform;
  }
  for (const auto& [by, known] : by_level_known) {
    if (!known) {
      throw InputError("unknown level '" + lookup(by) + "' for smooth by-factor '" + by + "'");
    }
  }
  return row;
}

GroupedDesign build_grouped_design(const ModelSpec& spec,
                                   std::span<const MetricObservation> data) {
  std::vector<const MetricObservation*> rows;
  for (const auto& obs : data) {
    if (obs.metric_kind == spec.response) rows.push_back(&obs);
  }
  if (rows.empty()) {
    throw InputError("no observations for response metric " +
                     std::string(to_string(spec.response)));
  }
  for (const auto* obs : rows) {
    if (!(obs->value > 0.0 && obs->value < 1.0)) {
      throw InputError("response value " + std::to_string(obs->value) +
                       " is not strictly inside (0, 1); squeeze responses before fitting");
    }
    if (obs->num_tr_images <= 0) throw InputError("num_tr_images must be positive");
  }

  GroupedDesign design;
  design.smooth_terms = spec.smooths;

  // Fields that split the data into groups: factors, then by-variables.
  std::vector<std::string> key_fields;
  for (const auto& f : spec.factors) {
    if (!is_factor_field(f.name)) throw InputError("'" + f.name + "' is not a factor field");
    if (std::find(key_fields.begin(), key_fields.end(), f.name) != key_fields.end()) {
      throw InputError("factor '" + f.name + "' listed twice");
    }
    key_fields.push_back(f.name);
  }
  for (const auto& s : spec.smooths) {
    if (s.k < 3) throw InputError("smooth " + s.label() + " needs k >= 3");
    if (s.by.empty()) continue;
    if (!is_factor_field(s.by)) throw InputError("'" + s.by + "' is not a factor field");
    if (std::find(key_fields.begin(), key_fields.end(), s.by) == key_fields.end()) {
      key_fields.push_back(s.by);
    }
  }

  std::vector<std::vector<std::string>> field_levels(key_fields.size());
  for (std::size_t i = 0; i < key_fields.size(); ++i) {
    std::set<std::string> seen;
    for (const auto* obs : rows) seen.insert(obs->field(key_fields[i]));
    std::vector<std::string> levels;
    if (i < spec.factors.size()) {
      const auto& ref = spec.factors[i].reference;
      if (!seen.contains(ref)) {
        throw InputError("reference level '" + ref + "' of factor '" + key_fields[i] +
                         "' is absent from the data");
      }
      levels.push_back(ref);
      seen.erase(ref);
    }
    levels.insert(levels.end(), seen.begin(), seen.end());
    field_levels[i] = std::move(levels);
  }

  // Column layout.
  design.labels.push_back("(Intercept)");
  int column = 1;
  for (std::size_t i = 0; i < spec.factors.size(); ++i) {
    FactorLevels f;
    f.name = key_fields[i];
    f.levels = field_levels[i];
    f.first_column = column;
    for (std::size_t l = 1; l < f.levels.size(); ++l) design.labels.push_back(f.name + f.levels[l]);
    column += f.columns();
    design.factors.push_back(std::move(f));
  }

  std::set<double> distinct_x;
  design.min_n = rows.front()->num_tr_images;
  design.max_n = rows.front()->num_tr_images;
  for (const auto* obs : rows) {
    distinct_x.insert(std::log(static_cast<double>(obs->num_tr_images)));
    design.min_n = std::min(design.min_n, obs->num_tr_images);
    design.max_n = std::max(design.max_n, obs->num_tr_images);
  }
  const std::vector<double> xs(distinct_x.begin(), distinct_x.end());

  struct PendingBlock {
    std::size_t term;
    int by_field;  // index into key_fields, -1 when no by
    int by_level;
  };
  std::vector<PendingBlock> pending;
  for (std::size_t t = 0; t < spec.smooths.size(); ++t) {
    const auto& s = spec.smooths[t];
    if (xs.size() < 2) {
      throw InputError("smooth " + s.label() + " needs at least 2 distinct num_tr_images values");
    }
    const KnotVector knots = place_knots(xs, s.k);
    if (s.by.empty()) {
      SmoothBlock blk;
      blk.label = s.label();
      blk.term = s.label();
      blk.knots = knots;
      design.smooths.push_back(std::move(blk));
      pending.push_back({t, -1, -1});
      continue;
    }
    const int field = static_cast<int>(
        std::find(key_fields.begin(), key_fields.end(), s.by) - key_fields.begin());
    for (std::size_t l = 0; l < field_levels[field].size(); ++l) {
      SmoothBlock blk;
      blk.by = s.by;
      blk.level = field_levels[field][l];
      blk.label = s.label() + blk.level;
      blk.term = s.label();
      blk.knots = knots;
      design.smooths.push_back(std::move(blk));
      pending.push_back({t, field, static_cast<int>(l)});
    }
  }

  // Group observations by their key.
  using Key = std::pair<std::vector<int>, std::int64_t>;
  std::map<Key, std::vector<double>> grouped;
  for (const auto* obs : rows) {
    Key key;
    key.first.reserve(key_fields.size());
    for (std::size_t i = 0; i < key_fields.size(); ++i) {
      key.first.push_back(level_index(field_levels[i], obs->field(key_fields[i])));
    }
    key.second = obs->num_tr_images;
    grouped[key].push_back(obs->value);
  }

  const int groups = static_cast<int>(grouped.size());
  design.n_obs = static_cast<std::int64_t>(rows.size());
  design.stats.reserve(static_cast<std::size_t>(groups));
  design.responses.reserve(static_cast<std::size_t>(groups));
  design.sum_y.resize(groups);
  design.sum_y2.resize(groups);

  std::vector<Key> keys;
  keys.reserve(static_cast<std::size_t>(groups));
  for (auto& [key, values] : grouped) {
    std::sort(values.begin(), values.end());
    BetaGroupStats st;
    st.count = static_cast<double>(values.size());
    double sy = 0.0;
    double sy2 = 0.0;
    for (double y : values) {
      st.sum_log_y += std::log(y);
      st.sum_log_1my += std::log1p(-y);
      sy += y;
      sy2 += y * y;
    }
    const auto g = static_cast<Eigen::Index>(keys.size());
    design.sum_y(g) = sy;
    design.sum_y2(g) = sy2;
    design.stats.push_back(st);
    design.responses.push_back(std::move(values));
    keys.push_back(key);
  }

  const auto in_block = [&](const PendingBlock& pb, const Key& key) {
    return pb.by_field < 0 || key.first[static_cast<std::size_t>(pb.by_field)] == pb.by_level;
  };

  // Centring constraints are the count-weighted basis column sums over the
  // block's rows.
  for (std::size_t b = 0; b < design.smooths.size(); ++b) {
    auto& blk = design.smooths[b];
    const CubicRegressionSpline spline(blk.knots);
    const int k = spline.size();
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    std::set<std::int64_t> sizes;
    for (int g = 0; g < groups; ++g) {
      if (!in_block(pending[b], keys[static_cast<std::size_t>(g)])) continue;
      const Eigen::RowVectorXd r = spline.basis_row(std::log(static_cast<double>(keys[g].second)));
      sums += design.stats[static_cast<std::size_t>(g)].count * r.transpose();
      gram += design.stats[static_cast<std::size_t>(g)].count * r.transpose() * r;
      sizes.insert(keys[static_cast<std::size_t>(g)].second);
    }
    if (sizes.size() < 2) {
      throw InputError("smooth " + blk.label +
                       " is not estimable: fewer than 2 distinct num_tr_images values");
    }
    blk.constraint = sums;
    blk.transform = sum_to_zero_transform(sums);
    blk.first_column = column;
    column += blk.rank();
    const Eigen::MatrixXd raw_penalty =
        blk.transform.transpose() * spline.penalty() * blk.transform;
    const Eigen::MatrixXd centred_gram = blk.transform.transpose() * gram * blk.transform;
    blk.penalty_scale = centred_gram.norm() / raw_penalty.norm();
    blk.penalty = blk.penalty_scale * raw_penalty;
    blk.penalty = 0.5 * (blk.penalty + blk.penalty.transpose()).eval();
    for (int j = 0; j < blk.rank(); ++j) design.labels.push_back(blk.label + "." + std::to_string(j + 1));
  }

  design.x = Eigen::MatrixXd::Zero(groups, column);
  for (int g = 0; g < groups; ++g) {
    const Key& key = keys[static_cast<std::size_t>(g)];
    design.x(g, 0) = 1.0;
    for (const auto& f : design.factors) {
      const std::size_t fi = static_cast<std::size_t>(&f - design.factors.data());
      const int idx = key.first[fi];
      if (idx > 0) design.x(g, f.first_column + idx - 1) = 1.0;
    }
    const double x = std::log(static_cast<double>(key.second));
    for (std::size_t b = 0; b < design.smooths.size(); ++b) {
      if (!in_block(pending[b], key)) continue;
      const auto& blk = design.smooths[b];
      const CubicRegressionSpline spline(blk.knots);
      design.x.block(g, blk.first_column, 1, blk.rank()) = spline.basis_row(x) * blk.transform;
    }
  }

  // Parametric identifiability, checked column by column so the offending
  // term can be named.
  const int parametric = design.smooths.empty() ? column : design.smooths.front().first_column;
  Eigen::MatrixXd weighted = design.x.leftCols(parametric);
  for (int g = 0; g < groups; ++g) {
    weighted.row(g) *= std::sqrt(design.stats[static_cast<std::size_t>(g)].count);
  }
  for (int j = 1; j <= parametric; ++j) {
    if (matrix_rank(weighted.leftCols(j)) < j) {
      throw InputError("rank-deficient design: term '" + design.labels[static_cast<std::size_t>(j - 1)] +
                       "' is not estimable from the data");
    }
  }
  return design;
}

double penalized_objective(const GroupedDesign& design, std::span<const double> lambdas,
                           const Eigen::VectorXd& beta, double log_phi,
                           Eigen::VectorXd* gradient) {
  const Eigen::VectorXd eta = design.x * beta;
  const Eigen::MatrixXd s = design.penalty(lambdas);
  const Eigen::VectorXd s_beta = s * beta;
  double total = -0.5 * beta.dot(s_beta);
  Eigen::VectorXd d_eta(design.groups());
  double d_rho = 0.0;
  for (int g = 0; g < design.groups(); ++g) {
    const BetaGroupTerms t =
        beta_group_terms(design.stats[static_cast<std::size_t>(g)], eta(g), log_phi, false);
    total += t.value;
    d_eta(g) = t.d_eta;
    d_rho += t.d_rho;
  }
  if (gradient != nullptr) {
    gradient->resize(design.coefficients() + 1);
    gradient->head(design.coefficients()) = design.x.transpose() * d_eta - s_beta;
    (*gradient)(design.coefficients()) = d_rho;
  }
  return total;
}

}  // namespace lcurve
