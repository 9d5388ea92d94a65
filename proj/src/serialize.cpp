#include "lcurve/serialize.hpp"

#include <cstdio>

#include "lcurve/error.hpp"
#include "lcurve/random.hpp"

namespace lcurve {

using Json = nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw InputError("malformed digest '" + s + "'");
  }
  return std::stoull(s, nullptr, 16);
}

Json vec_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json mat_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::VectorXd vec_from(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd mat_from(const Json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nc = rows.empty() ? cols_if_empty : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != nc) {
      throw InputError("ragged matrix in model file");
    }
    for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

std::string_view transform_name(CurveTransform t) {
  return t == CurveTransform::log_n ? "log_n" : "log_inverse_n";
}

CurveTransform parse_transform(const std::string& s) {
  if (s == "log_n") return CurveTransform::log_n;
  if (s == "log_inverse_n") return CurveTransform::log_inverse_n;
  throw InputError("unknown curve transform '" + s + "'");
}

LearningCurveModel ols_from(const Json& j) {
  LearningCurveModel m;
  m.metric_kind = parse_metric_kind(j.at("metric").get<std::string>());
  m.intercept = j.at("intercept").get<double>();
  m.slope = j.at("slope").get<double>();
  m.transform = parse_transform(j.at("transform").get<std::string>());
  m.adj_r_squared = j.at("adj_r_squared").get<double>();
  m.n_obs = j.at("n_obs").get<std::int64_t>();
  m.max_observed_n = j.at("max_observed_n").get<std::int64_t>();
  if (m.transform != transform_for(m.metric_kind)) {
    throw InputError("curve transform does not match metric " + std::string(to_string(m.metric_kind)));
  }
  return m;
}

AdditiveModel gam_from(const Json& j) {
  AdditiveModel m;
  m.response = parse_metric_kind(j.at("response").get<std::string>());
  m.squeeze_eps = j.at("squeeze_eps").get<double>();
  for (const auto& f : j.at("factors")) {
    FactorLevels fl;
    fl.name = f.at("name").get<std::string>();
    fl.levels = f.at("levels").get<std::vector<std::string>>();
    fl.first_column = f.at("first_column").get<int>();
    m.factors.push_back(std::move(fl));
  }
  for (const auto& s : j.at("smooth_terms")) {
    m.smooth_terms.push_back({s.at("by").get<std::string>(), s.at("k").get<int>()});
  }
  for (const auto& s : j.at("smooths")) {
    SmoothBlock b;
    b.label = s.at("label").get<std::string>();
    b.term = s.at("term").get<std::string>();
    b.by = s.at("by").get<std::string>();
    b.level = s.at("level").get<std::string>();
    b.knots.knots = s.at("knots").get<std::vector<double>>();
    b.constraint = vec_from(s.at("constraint"));
    b.transform = mat_from(s.at("transform"));
    b.penalty = mat_from(s.at("penalty"));
    b.penalty_scale = s.at("penalty_scale").get<double>();
    b.first_column = s.at("first_column").get<int>();
    m.smooths.push_back(std::move(b));
  }
  m.coefficient_labels = j.at("coefficient_labels").get<std::vector<std::string>>();
  m.coefficients = vec_from(j.at("coefficients"));
  m.coefficient_edf = j.at("coefficient_edf").get<std::vector<double>>();
  m.covariance = mat_from(j.at("covariance"));
  m.lambdas = j.at("lambdas").get<std::vector<double>>();
  m.phi = j.at("phi").get<double>();
  const Json& st = j.at("stats");
  m.stats.loglik = st.at("loglik").get<double>();
  m.stats.penalized_loglik = st.at("penalized_loglik").get<double>();
  m.stats.deviance = st.at("deviance").get<double>();
  m.stats.null_deviance = st.at("null_deviance").get<double>();
  m.stats.deviance_explained = st.at("deviance_explained").get<double>();
  m.stats.adj_r_squared = st.at("adj_r_squared").get<double>();
  m.stats.aic = st.at("aic").get<double>();
  m.stats.total_edf = st.at("total_edf").get<double>();
  m.stats.n_obs = st.at("n_obs").get<std::int64_t>();
  const Json& dg = j.at("diagnostics");
  m.diagnostics.iterations = dg.at("iterations").get<int>();
  m.diagnostics.converged = dg.at("converged").get<bool>();
  m.diagnostics.penalized_trace = dg.at("penalized_trace").get<std::vector<double>>();
  m.min_observed_n = j.at("min_observed_n").get<std::int64_t>();
  m.max_observed_n = j.at("max_observed_n").get<std::int64_t>();

  const auto p = static_cast<Eigen::Index>(m.coefficient_labels.size());
  if (m.coefficients.size() != p || m.covariance.rows() != p || m.covariance.cols() != p ||
      static_cast<Eigen::Index>(m.coefficient_edf.size()) != p ||
      m.lambdas.size() != m.smooths.size()) {
    throw InputError("inconsistent dimensions in model file");
  }
  for (const auto& b : m.smooths) {
    if (b.first_column < 0 || b.first_column + b.rank() > p ||
        b.transform.rows() != static_cast<Eigen::Index>(b.knots.size())) {
      throw InputError("inconsistent smooth block '" + b.label + "' in model file");
    }
  }
  for (const auto& f : m.factors) {
    if (f.levels.empty() || f.first_column < 0 || f.first_column + f.columns() > p) {
      throw InputError("inconsistent factor '" + f.name + "' in model file");
    }
  }
  if (!(m.phi > 0.0)) throw InputError("model precision must be positive");
  return m;
}

}  // namespace

void InputDigest::add_file(std::string path, std::string_view contents) {
  files.push_back({std::move(path), fnv1a(contents)});
}

MetricKind ModelDocument::metric() const {
  if (const auto* o = std::get_if<LearningCurveModel>(&model)) return o->metric_kind;
  return std::get<AdditiveModel>(model).response;
}

Json to_json(const InputDigest& d) {
  Json files = Json::array();
  for (const auto& f : d.files) files.push_back({{"path", f.path}, {"fnv1a64", hex64(f.fnv1a)}});
  return {{"files", files}, {"seeds", d.seeds}};
}

InputDigest digest_from_json(const Json& j) {
  InputDigest d;
  for (const auto& f : j.at("files")) {
    d.files.push_back({f.at("path").get<std::string>(), parse_hex64(f.at("fnv1a64").get<std::string>())});
  }
  d.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  return d;
}

Json to_json(const LearningCurveModel& m) {
  return {{"model_family", "ols_log"},
          {"metric", to_string(m.metric_kind)},
          {"intercept", m.intercept},
          {"slope", m.slope},
          {"transform", transform_name(m.transform)},
          {"adj_r_squared", m.adj_r_squared},
          {"n_obs", m.n_obs},
          {"max_observed_n", m.max_observed_n}};
}

Json to_json(const AdditiveModel& m) {
  Json factors = Json::array();
  for (const auto& f : m.factors) {
    factors.push_back({{"name", f.name}, {"levels", f.levels}, {"first_column", f.first_column}});
  }
  Json terms = Json::array();
  for (const auto& s : m.smooth_terms) terms.push_back({{"by", s.by}, {"k", s.k}});
  Json smooths = Json::array();
  for (const auto& b : m.smooths) {
    smooths.push_back({{"label", b.label},
                       {"term", b.term},
                       {"by", b.by},
                       {"level", b.level},
                       {"knots", b.knots.knots},
                       {"constraint", vec_json(b.constraint)},
                       {"transform", mat_json(b.transform)},
                       {"penalty", mat_json(b.penalty)},
                       {"penalty_scale", b.penalty_scale},
                       {"first_column", b.first_column}});
  }
  Json summary = Json::array();
  for (int j = 0; j < m.parametric_columns(); ++j) {
    summary.push_back({{"term", m.coefficient_labels[static_cast<std::size_t>(j)]},
                       {"estimate", m.coefficients(j)},
                       {"std_error", std::sqrt(std::max(0.0, m.covariance(j, j)))},
                       {"p_value", wald_p(m, m.coefficient_labels[static_cast<std::size_t>(j)])}});
  }
  Json edf = Json::array();
  for (const auto& t : term_edf(m)) {
    edf.push_back({{"term", t.label}, {"edf", t.edf}, {"ref_df", t.ref_df}, {"p_value", wald_p(m, t.label)}});
  }
  return {{"model_family", "beta_gam"},
          {"response", to_string(m.response)},
          {"squeeze_eps", m.squeeze_eps},
          {"factors", factors},
          {"smooth_terms", terms},
          {"smooths", smooths},
          {"coefficient_labels", m.coefficient_labels},
          {"coefficients", vec_json(m.coefficients)},
          {"coefficient_edf", m.coefficient_edf},
          {"covariance", mat_json(m.covariance)},
          {"lambdas", m.lambdas},
          {"phi", m.phi},
          {"stats",
           {{"loglik", m.stats.loglik},
            {"penalized_loglik", m.stats.penalized_loglik},
            {"deviance", m.stats.deviance},
            {"null_deviance", m.stats.null_deviance},
            {"deviance_explained", m.stats.deviance_explained},
            {"adj_r_squared", m.stats.adj_r_squared},
            {"aic", m.stats.aic},
            {"total_edf", m.stats.total_edf},
            {"n_obs", m.stats.n_obs}}},
          {"diagnostics",
           {{"iterations", m.diagnostics.iterations},
            {"converged", m.diagnostics.converged},
            {"penalized_trace", m.diagnostics.penalized_trace}}},
          {"min_observed_n", m.min_observed_n},
          {"max_observed_n", m.max_observed_n},
          {"parametric_summary", summary},
          {"term_summary", edf}};
}

std::string serialize_model(const ModelDocument& doc) {
  Json j = std::visit([](const auto& m) { return to_json(m); }, doc.model);
  Json steps = Json::array();
  for (const auto& s : doc.elimination) steps.push_back({{"term", s.term}, {"p_value", s.p_value}});
  j["elimination"] = steps;
  j["inputs"] = to_json(doc.inputs);
  return j.dump(2) + "\n";
}

ModelDocument parse_model(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
  try {
    ModelDocument doc;
    const std::string family = j.at("model_family").get<std::string>();
    if (family == "ols_log") {
      doc.model = ols_from(j);
    } else if (family == "beta_gam") {
      doc.model = gam_from(j);
    } else {
      throw InputError("unknown model_family '" + family + "'");
    }
    for (const auto& s : j.at("elimination")) {
      doc.elimination.push_back({s.at("term").get<std::string>(), s.at("p_value").get<double>()});
    }
    doc.inputs = digest_from_json(j.at("inputs"));
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid model JSON: ") + e.what());
  }
}

std::string serialize_manifest(const SamplingManifest& manifest, const InputDigest& inputs,
                               const std::optional<CoverageReport>& coverage) {
  Json classes = Json::array();
  for (const auto& c : manifest.classes) {
    Json train = Json::object();
    for (const auto& [size, ids] : c.train_subsets) train[std::to_string(size)] = ids;
    classes.push_back({{"class", c.class_label}, {"pool", c.pool}, {"test_ids", c.test_ids}, {"train_subsets", train}});
  }
  Json j = {{"seed", manifest.seed},
            {"size_ladder", manifest.size_ladder},
            {"test_size", manifest.test_size},
            {"subsets", manifest.mode == SubsetMode::nested ? "nested" : "independent"},
            {"classes", classes}};
  if (coverage) {
    Json viol = Json::array();
    for (const auto& v : coverage->violations) {
      viol.push_back({{"class", v.class_label}, {"split", v.split}, {"locations", v.locations}});
    }
    j["location_coverage"] = {{"validated", coverage->validated},
                              {"reason", coverage->reason},
                              {"violations", viol}};
  }
  j["inputs"] = to_json(inputs);
  return j.dump(2) + "\n";
}

SamplingManifest parse_manifest(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    SamplingManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.size_ladder = j.at("size_ladder").get<std::vector<std::int64_t>>();
    m.test_size = j.at("test_size").get<std::int64_t>();
    m.mode = j.at("subsets").get<std::string>() == "independent" ? SubsetMode::independent
                                                                  : SubsetMode::nested;
    for (const auto& c : j.at("classes")) {
      ClassSplit split;
      split.class_label = c.at("class").get<std::string>();
      split.pool = c.at("pool").get<std::vector<std::string>>();
      split.test_ids = c.at("test_ids").get<std::vector<std::string>>();
      for (const auto& [size, ids] : c.at("train_subsets").items()) {
        split.train_subsets[std::stoll(size)] = ids.get<std::vector<std::string>>();
      }
      m.classes.push_back(std::move(split));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid manifest JSON: ") + e.what());
  }
}

Json to_json(const PlanReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    const auto& r = row.result;
    rows.push_back({{"metric", to_string(r.metric_kind)},
                    {"direction", direction_for(r.metric_kind) == Direction::at_least ? "at_least" : "at_most"},
                    {"target", r.target},
                    {"required_n", r.required_n ? Json(*r.required_n) : Json("unattainable")},
                    {"predicted_value", r.predicted_value},
                    {"extrapolated", r.extrapolated},
                    {"provenance", to_string(row.provenance)}});
  }
  return {{"rows", rows},
          {"required_n", report.required_n},
          {"binding_metric", to_string(report.binding_metric)}};
}

}  // namespace lcurve
