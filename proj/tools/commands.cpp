#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "lcurve/atomic_file.hpp"
#include "lcurve/beta_family.hpp"
#include "lcurve/csv.hpp"
#include "lcurve/design.hpp"
#include "lcurve/error.hpp"
#include "lcurve/gam.hpp"
#include "lcurve/metrics.hpp"
#include "lcurve/ols.hpp"
#include "lcurve/planner.hpp"
#include "lcurve/serialize.hpp"
#include "lcurve/simulate.hpp"
#include "lcurve/svg_plot.hpp"

namespace lcurve::cli {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (path) {
    write_file_atomic(*path, text);
  } else {
    out << text;
  }
}

/// "AU,deep,dnsNet161" (dataset, tuning, architecture) or name=level pairs.
Cell parse_cell(const std::string& text) {
  Cell cell;
  const auto parts = split_list(text);
  const bool named = std::any_of(parts.begin(), parts.end(),
                                 [](const std::string& p) { return p.find('=') != std::string::npos; });
  if (named) {
    for (const auto& p : parts) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw InputError("cell entry '" + p + "' is not name=level");
      cell.factors[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return cell;
  }
  if (parts.size() != 3) {
    throw InputError("--cell expects dataset,tuning,architecture or name=level pairs");
  }
  return Cell::of(parts[1], parts[0], parts[2], 1);
}

std::vector<MetricObservation> of_metric(const std::vector<MetricObservation>& obs, MetricKind kind) {
  std::vector<MetricObservation> out;
  std::copy_if(obs.begin(), obs.end(), std::back_inserter(out),
               [&](const MetricObservation& o) { return o.metric_kind == kind; });
  if (out.empty()) throw InputError("no observations for metric " + std::string(to_string(kind)));
  return out;
}

struct Loaded {
  std::vector<MetricObservation> observations;
  InputDigest digest;
};

Loaded load_observations(const std::string& path) {
  Loaded l;
  const std::string text = read_file(path);
  l.digest.add_file(path, text);
  l.observations = csv::parse_observations(text);
  return l;
}

void print_gam_summary(const AdditiveModel& m, std::ostream& out) {
  out << "response " << to_string(m.response) << "  n " << m.stats.n_obs << "  phi "
      << format_g(m.phi) << "\n";
  out << "term,estimate,std_error,p_value\n";
  for (int j = 0; j < m.parametric_columns(); ++j) {
    const auto& label = m.coefficient_labels[static_cast<std::size_t>(j)];
    out << label << "," << fixed(m.coefficients(j), 3) << ","
        << fixed(std::sqrt(std::max(0.0, m.covariance(j, j))), 3) << "," << format_g(wald_p(m, label))
        << "\n";
  }
  out << "smooth,edf,ref_df,lambda,p_value\n";
  for (std::size_t b = 0; b < m.smooths.size(); ++b) {
    const auto& blk = m.smooths[b];
    double edf = 0.0;
    for (int j = 0; j < blk.rank(); ++j) edf += m.coefficient_edf[static_cast<std::size_t>(blk.first_column + j)];
    out << blk.label << "," << fixed(edf, 3) << "," << blk.rank() << "," << format_g(m.lambdas[b]) << ","
        << format_g(wald_p(m, blk.label)) << "\n";
  }
  out << "deviance_explained " << fixed(m.stats.deviance_explained, 3) << "\n";
  out << "adj_r_squared " << fixed(m.stats.adj_r_squared, 3) << "\n";
}

void print_plan(const PlanReport& report, std::ostream& out) {
  for (const auto& row : report.rows) {
    const auto& r = row.result;
    out << to_string(r.metric_kind) << (direction_for(r.metric_kind) == Direction::at_least ? " >= " : " <= ")
        << r.target << ": ";
    if (r.required_n) {
      out << "n " << *r.required_n << " (predicted " << fixed(r.predicted_value, 4) << ", "
          << to_string(row.provenance) << (r.extrapolated ? ", extrapolated" : "") << ")\n";
    } else {
      out << "unattainable (" << to_string(row.provenance) << ")\n";
    }
  }
  out << "required_n " << report.required_n << " (binding " << to_string(report.binding_metric) << ")\n";
}

// ---------------------------------------------------------------------------

struct MetricsArgs {
  std::string predictions;
  std::string classes;
  std::optional<std::string> out;
};

void cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  std::optional<std::vector<std::string>> classes;
  if (!a.classes.empty()) classes = split_list(a.classes);
  const auto table = csv::parse_predictions(read_file(a.predictions), classes);
  const auto rows = per_class_metrics(tally_confusion(table.records, table.classes));
  std::string text = "class,tp,fp,tn,fn,ACC,PRC,TPR,FPR\n";
  for (const auto& r : rows) {
    const std::string fields[] = {r.class_label,
                                  std::to_string(r.counts.tp),
                                  std::to_string(r.counts.fp),
                                  std::to_string(r.counts.tn),
                                  std::to_string(r.counts.fn),
                                  csv::format_double(r.acc),
                                  r.prc ? csv::format_double(*r.prc) : "NA",
                                  csv::format_double(r.tpr),
                                  csv::format_double(r.fpr)};
    text += csv::join(fields) + "\n";
  }
  emit(a.out, text, out);
}

struct AggregateArgs {
  std::string observations;
  std::string by = "dataset,num_tr_images";
  std::string metric;
  int decimals = 2;
  std::optional<std::string> out;
};

void cmd_aggregate(const AggregateArgs& a, std::ostream& out) {
  auto obs = load_observations(a.observations).observations;
  if (!a.metric.empty()) obs = of_metric(obs, parse_metric_kind(a.metric));
  std::vector<std::string> by = split_list(a.by);
  if (std::find(by.begin(), by.end(), "metric") == by.end()) by.insert(by.begin(), "metric");
  const auto rows = aggregate(obs, by);
  std::vector<std::string> header = by;
  header.insert(header.end(), {"mean", "sd", "count"});
  std::string text = csv::join(header) + "\n";
  for (const auto& r : rows) {
    std::vector<std::string> fields = r.key;
    fields.push_back(fixed(r.mean, a.decimals));
    fields.push_back(r.sd ? fixed(*r.sd, a.decimals) : "");
    fields.push_back(std::to_string(r.count));
    text += csv::join(fields) + "\n";
  }
  emit(a.out, text, out);
}

struct FitOlsArgs {
  std::string observations;
  std::string metric = "ACC";
  std::string by;
  std::string out;
};

void cmd_fit_ols(const FitOlsArgs& a, std::ostream& out) {
  const MetricKind kind = parse_metric_kind(a.metric);
  auto loaded = load_observations(a.observations);
  const auto obs = of_metric(loaded.observations, kind);
  std::vector<CurvePoint> points;
  if (a.by.empty()) {
    for (const auto& o : obs) points.push_back({o.num_tr_images, o.value});
  } else {
    std::vector<std::string> by = split_list(a.by);
    if (std::find(by.begin(), by.end(), "num_tr_images") == by.end()) by.push_back("num_tr_images");
    const auto col = std::find(by.begin(), by.end(), "num_tr_images") - by.begin();
    for (const auto& r : aggregate(obs, by)) {
      points.push_back({std::stoll(r.key[static_cast<std::size_t>(col)]), r.mean});
    }
  }
  ModelDocument doc;
  doc.model = fit_log_curve(points, kind);
  doc.inputs = loaded.digest;
  write_file_atomic(a.out, serialize_model(doc));
  const auto& m = std::get<LearningCurveModel>(doc.model);
  out << to_string(kind) << " = " << fixed(m.intercept, 4) << " + " << fixed(m.slope, 4)
      << (m.transform == CurveTransform::log_n ? " * ln(n)" : " * ln(1/n)") << "  adj_r_squared "
      << fixed(m.adj_r_squared, 3) << "  points " << m.n_obs << "\n";
}

struct FitGamArgs {
  std::string observations;
  std::string metric = "ACC";
  bool eliminate = false;
  double alpha = 0.05;
  std::vector<double> lambdas;
  int k = 5;
  double squeeze_eps = 1e-4;
  bool serial = false;
  std::string out;
};

void cmd_fit_gam(const FitGamArgs& a, std::ostream& out) {
  const MetricKind kind = parse_metric_kind(a.metric);
  auto loaded = load_observations(a.observations);
  auto obs = of_metric(loaded.observations, kind);
  for (auto& o : obs) o.value = squeeze(o.value, a.squeeze_eps);

  ModelSpec spec = ModelSpec::standard(kind);
  spec.squeeze_eps = a.squeeze_eps;
  for (auto& s : spec.smooths) s.k = a.k;
  if (!a.lambdas.empty()) spec.fixed_lambdas = a.lambdas;
  const Execution policy = a.serial ? Execution::serial : Execution::parallel;

  ModelDocument doc;
  doc.inputs = loaded.digest;
  if (a.eliminate) {
    auto result = backward_eliminate(spec, obs, a.alpha, policy);
    doc.elimination = result.dropped;
    doc.model = std::move(result.model);
  } else {
    doc.model = fit(spec, obs, policy);
  }
  write_file_atomic(a.out, serialize_model(doc));
  for (const auto& step : doc.elimination) {
    out << "dropped " << step.term << " (p " << format_g(step.p_value) << ")\n";
  }
  print_gam_summary(std::get<AdditiveModel>(doc.model), out);
}

struct PlanArgs {
  std::string model;
  std::string preset;
  std::optional<double> target;
  std::optional<double> target_acc;
  std::optional<double> target_prc;
  std::optional<double> target_tpr;
  std::optional<double> target_fpr;
  std::string cell;
  std::int64_t ceiling = 100000;
  std::optional<std::string> out;
};

void cmd_plan(const PlanArgs& a, std::ostream& out) {
  std::map<MetricKind, double> targets;
  const std::pair<MetricKind, const std::optional<double>*> named[] = {
      {MetricKind::ACC, &a.target_acc}, {MetricKind::PRC, &a.target_prc},
      {MetricKind::TPR, &a.target_tpr}, {MetricKind::FPR, &a.target_fpr}};
  for (const auto& [kind, value] : named) {
    if (*value) targets[kind] = **value;
  }

  std::map<MetricKind, PlanSource> sources;
  InputDigest digest;
  if (!a.model.empty()) {
    const std::string text = read_file(a.model);
    digest.add_file(a.model, text);
    ModelDocument doc = parse_model(text);
    const MetricKind kind = doc.metric();
    if (a.target) targets[kind] = *a.target;
    for (const auto& [k, v] : targets) {
      if (k != kind) throw InputError("the model predicts " + std::string(to_string(kind)) + " only");
    }
    if (auto* ols = std::get_if<LearningCurveModel>(&doc.model)) {
      sources[kind] = {Provenance::fitted_ols, *ols};
    } else {
      if (a.cell.empty()) throw InputError("--cell is required for an additive model");
      auto model = std::make_shared<const AdditiveModel>(std::get<AdditiveModel>(std::move(doc.model)));
      sources[kind] = {Provenance::fitted_gam, GamSource{std::move(model), parse_cell(a.cell)}};
    }
  } else {
    if (a.preset != "table1") throw InputError("unknown preset '" + a.preset + "' (expected table1)");
    if (a.target) throw InputError("--target needs --model; use --target-acc and friends with a preset");
    for (MetricKind kind : kAllMetrics) sources[kind] = PlanSource::preset(kind);
  }
  if (targets.empty()) throw InputError("no target given");

  const PlanReport report = plan_report(targets, sources, a.ceiling);
  print_plan(report, out);
  if (a.out) {
    nlohmann::ordered_json j = to_json(report);
    j["inputs"] = to_json(digest);
    write_file_atomic(*a.out, j.dump(2) + "\n");
  }
}

struct DesignArgs {
  std::string manifest_in;
  std::int64_t test = 250;
  std::string ladder = "10,20,50,150,500,1000";
  std::uint64_t seed = 0;
  std::optional<std::size_t> pool;
  bool independent = false;
  std::size_t min_locations = 3;
  bool require_coverage = false;
  std::optional<std::string> out;
};

void cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(a.manifest_in);
  const auto images = csv::parse_image_list(text);

  std::map<std::string, std::vector<const csv::ImageRow*>> by_class;
  std::map<std::string, std::string> location_of;
  bool all_located = true;
  std::set<std::string> ids;
  for (const auto& img : images) {
    if (!ids.insert(img.image_id).second) throw InputError("duplicate image_id '" + img.image_id + "'");
    by_class[img.class_label].push_back(&img);
    if (img.location_id) {
      location_of[img.image_id] = *img.location_id;
    } else {
      all_located = false;
    }
  }
  std::vector<ClassPool> pools;
  for (auto& [label, rows] : by_class) {
    std::stable_sort(rows.begin(), rows.end(), [](const csv::ImageRow* x, const csv::ImageRow* y) {
      return x->timestamp.value_or(0) < y->timestamp.value_or(0);
    });
    std::vector<std::string> ordered;
    for (const auto* r : rows) ordered.push_back(r->image_id);
    if (a.pool) {
      try {
        ordered = equal_space_select(ordered, *a.pool);
      } catch (const InputError& e) {
        throw InputError("class '" + label + "': " + e.what());
      }
    }
    pools.push_back({label, std::move(ordered)});
  }

  std::vector<std::int64_t> ladder;
  for (const auto& s : split_list(a.ladder)) ladder.push_back(std::stoll(s));
  const SamplingManifest manifest = split_design(
      pools, a.test, ladder, a.seed, a.independent ? SubsetMode::independent : SubsetMode::nested);

  CoverageReport coverage;
  if (all_located) {
    coverage = validate_location_coverage(manifest, location_of, a.min_locations);
  } else {
    coverage.reason = "location_id missing for some images";
  }
  if (!coverage.validated) {
    err << "warning: cannot validate location coverage: " << coverage.reason << "\n";
    if (a.require_coverage) throw InputError("cannot validate location coverage: " + coverage.reason);
  }
  for (const auto& v : coverage.violations) {
    err << "warning: class " << v.class_label << " " << v.split << " split spans " << v.locations
        << " < " << a.min_locations << " locations\n";
  }
  if (a.require_coverage && !coverage.violations.empty()) {
    throw InputError(std::to_string(coverage.violations.size()) + " location coverage violations");
  }

  InputDigest digest;
  digest.add_file(a.manifest_in, text);
  digest.seeds.push_back(a.seed);
  emit(a.out, serialize_manifest(manifest, digest, coverage), out);
}

struct SimulateArgs {
  std::string cells = "default";
  std::uint64_t seed = 0;
  std::optional<double> phi;
  std::optional<double> class_sd;
  std::string metrics;
  bool serial = false;
  std::optional<std::string> out;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  GridConfig config;
  if (a.cells == "default") {
    config = GridConfig::log_linear(a.seed);
  } else if (a.cells == "per-size") {
    config = GridConfig::per_size(a.seed);
  } else {
    throw InputError("unknown --cells '" + a.cells + "' (expected default or per-size)");
  }
  if (a.phi) config.phi_sim = *a.phi;
  if (a.class_sd) {
    for (auto& g : config.generators) g.class_sd = *a.class_sd;
  }
  if (!a.metrics.empty()) {
    std::set<MetricKind> keep;
    for (const auto& m : split_list(a.metrics)) keep.insert(parse_metric_kind(m));
    std::erase_if(config.generators, [&](const MetricGenerator& g) { return !keep.count(g.metric_kind); });
  }
  const auto obs = simulate_grid(config, a.serial ? Execution::serial : Execution::parallel);
  emit(a.out, csv::write_observations(obs), out);
}

struct PlotArgs {
  std::string model;
  std::string observations;
  std::string cell;
  std::string out;
};

void cmd_curve_plot(const PlotArgs& a, std::ostream& out) {
  const ModelDocument doc = parse_model(read_file(a.model));
  const MetricKind kind = doc.metric();
  PlotSpec spec;
  spec.title = std::string(to_string(kind)) + " learning curve";
  spec.y_label = std::string(to_string(kind));

  double xmin = 10;
  double xmax = 1000;
  if (!a.observations.empty()) {
    const auto obs = of_metric(load_observations(a.observations).observations, kind);
    const std::string by[] = {"dataset", "num_tr_images", "architecture", "tuning", "augmentation"};
    std::map<std::string, PlotSeries> series;
    xmin = 1e300;
    xmax = 0;
    for (const auto& r : aggregate(obs, by)) {
      auto& s = series[r.key[0]];
      s.label = r.key[0] + " (class means)";
      const double n = std::stod(r.key[1]);
      s.x.push_back(n);
      s.y.push_back(r.mean);
      xmin = std::min(xmin, n);
      xmax = std::max(xmax, n);
    }
    for (auto& [_, s] : series) spec.points.push_back(std::move(s));
  }

  const auto grid = [&] {
    std::vector<double> xs;
    const double lo = std::log(std::max(1.0, xmin / 2));
    const double hi = std::log(xmax * 2);
    for (int i = 0; i <= 200; ++i) xs.push_back(std::exp(lo + (hi - lo) * i / 200.0));
    return xs;
  }();

  if (const auto* ols = std::get_if<LearningCurveModel>(&doc.model)) {
    PlotSeries c{"log-law fit", grid, {}};
    for (double x : grid) c.y.push_back(predict_metric(*ols, x));
    spec.curves.push_back(std::move(c));
  } else {
    const auto& m = std::get<AdditiveModel>(doc.model);
    std::vector<std::pair<std::string, Cell>> cells;
    if (!a.cell.empty()) {
      cells.emplace_back(a.cell, parse_cell(a.cell));
    } else {
      Cell base;
      for (const auto& f : m.factors) base.factors[f.name] = f.reference();
      std::set<std::pair<std::string, std::string>> levels;
      for (const auto& blk : m.smooths) {
        if (!blk.by.empty()) levels.insert({blk.by, blk.level});
      }
      if (levels.empty()) cells.emplace_back("fit", base);
      for (const auto& [by, level] : levels) {
        Cell c = base;
        c.factors[by] = level;
        cells.emplace_back(level + " (reference levels)", c);
      }
    }
    for (auto& [label, cell] : cells) {
      PlotSeries c{label, {}, {}};
      for (double x : grid) {
        cell.num_tr_images = std::max<std::int64_t>(1, std::llround(x));
        c.x.push_back(static_cast<double>(cell.num_tr_images));
        c.y.push_back(predict(m, cell));
      }
      spec.curves.push_back(std::move(c));
    }
  }
  write_file_atomic(a.out, render_curve_svg(spec));
  out << "wrote " << a.out << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning-curve modelling and sample-size planning for balanced image classification studies",
               "lcurve"};
  app.require_subcommand(1);

  MetricsArgs metrics;
  auto* c_metrics = app.add_subcommand("metrics", "Per-class ACC/PRC/TPR/FPR from prediction records");
  c_metrics->add_option("--predictions", metrics.predictions, "Prediction CSV")->required();
  c_metrics->add_option("--classes", metrics.classes, "Comma-separated class list");
  c_metrics->add_option("--out", metrics.out, "Output CSV (stdout when omitted)");

  AggregateArgs agg;
  auto* c_agg = app.add_subcommand("aggregate", "Means and standard deviations of metric observations");
  c_agg->add_option("--observations", agg.observations, "Observation CSV")->required();
  c_agg->add_option("--by", agg.by, "Comma-separated grouping fields");
  c_agg->add_option("--metric", agg.metric, "Restrict to one metric");
  c_agg->add_option("--decimals", agg.decimals, "Rounding of reported values")->check(CLI::Range(0, 17));
  c_agg->add_option("--out", agg.out, "Output CSV (stdout when omitted)");

  FitOlsArgs ols;
  auto* c_ols = app.add_subcommand("fit-ols", "Fit a logarithmic learning curve");
  c_ols->add_option("--observations", ols.observations, "Observation CSV")->required();
  c_ols->add_option("--metric", ols.metric, "ACC, PRC, TPR or FPR");
  c_ols->add_option("--by", ols.by, "Average within these fields (and size) before fitting");
  c_ols->add_option("--out", ols.out, "Model JSON")->required();

  FitGamArgs gam;
  auto* c_gam = app.add_subcommand("fit-gam", "Fit a Beta additive model");
  c_gam->add_option("--observations", gam.observations, "Observation CSV")->required();
  c_gam->add_option("--metric", gam.metric, "ACC, PRC, TPR or FPR");
  c_gam->add_flag("--eliminate", gam.eliminate, "Backward stepwise elimination");
  c_gam->add_option("--alpha", gam.alpha, "Elimination level")->check(CLI::Range(0.0, 1.0));
  c_gam->add_option("--lambda", gam.lambdas, "Fixed smoothing parameter(s); skips the grid search");
  c_gam->add_option("--k", gam.k, "Knots per smooth")->check(CLI::Range(3, 50));
  c_gam->add_option("--squeeze-eps", gam.squeeze_eps, "Boundary squeeze for 0 and 1 values");
  c_gam->add_flag("--serial", gam.serial, "Evaluate smoothing parameter candidates serially");
  c_gam->add_option("--out", gam.out, "Model JSON")->required();

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan", "Required training images per class for target metrics");
  c_plan->add_option("--model", plan.model, "Model JSON from fit-ols or fit-gam");
  c_plan->add_option("--preset", plan.preset, "Built-in curves: table1");
  c_plan->add_option("--target", plan.target, "Target for the model's metric");
  c_plan->add_option("--target-acc", plan.target_acc, "Minimum ACC");
  c_plan->add_option("--target-prc", plan.target_prc, "Minimum PRC");
  c_plan->add_option("--target-tpr", plan.target_tpr, "Minimum TPR");
  c_plan->add_option("--target-fpr", plan.target_fpr, "Maximum FPR");
  c_plan->add_option("--cell", plan.cell, "dataset,tuning,architecture or name=level pairs");
  c_plan->add_option("--ceiling", plan.ceiling, "Largest n considered")->check(CLI::Range(1, 100000000));
  c_plan->add_option("--out", plan.out, "Report JSON");

  DesignArgs design;
  auto* c_design = app.add_subcommand("design", "Balanced sampling manifest from a time-ordered image list");
  c_design->add_option("--manifest-in", design.manifest_in, "CSV with class,image_id[,timestamp,location_id]")->required();
  c_design->add_option("--test", design.test, "Test images per class");
  c_design->add_option("--ladder", design.ladder, "Comma-separated training sizes");
  c_design->add_option("--seed", design.seed, "Random seed");
  c_design->add_option("--pool", design.pool, "Equal-spacing preselection per class");
  c_design->add_flag("--independent", design.independent, "Draw training subsets independently");
  c_design->add_option("--min-locations", design.min_locations, "Location coverage threshold");
  c_design->add_flag("--require-coverage", design.require_coverage, "Fail on coverage violations");
  c_design->add_option("--out", design.out, "Manifest JSON (stdout when omitted)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Synthetic metric observations over the experiment grid");
  c_sim->add_option("--cells", sim.cells, "default (log-linear) or per-size");
  c_sim->add_option("--seed", sim.seed, "Master seed");
  c_sim->add_option("--phi", sim.phi, "Beta precision");
  c_sim->add_option("--class-sd", sim.class_sd, "Standard deviation of class offsets (logit scale)");
  c_sim->add_option("--metrics", sim.metrics, "Comma-separated subset of ACC,PRC,TPR,FPR");
  c_sim->add_flag("--serial", sim.serial, "Serial reference kernel");
  c_sim->add_option("--out", sim.out, "Observation CSV (stdout when omitted)");

  PlotArgs plot;
  auto* c_plot = app.add_subcommand("curve-plot", "SVG of a fitted curve over observations");
  c_plot->add_option("--model", plot.model, "Model JSON")->required();
  c_plot->add_option("--observations", plot.observations, "Observation CSV");
  c_plot->add_option("--cell", plot.cell, "Cell for an additive model");
  c_plot->add_option("--out", plot.out, "SVG path")->required();

  std::vector<std::string> argv_rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_rest.begin(), argv_rest.end());
  try {
    app.parse(argv_rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error " << error_class_name(ErrorKind::input) << ": " << e.what() << "\n";
    return 2;
  }

  try {
    if (c_metrics->parsed()) cmd_metrics(metrics, out);
    if (c_agg->parsed()) cmd_aggregate(agg, out);
    if (c_ols->parsed()) cmd_fit_ols(ols, out);
    if (c_gam->parsed()) cmd_fit_gam(gam, out);
    if (c_plan->parsed()) cmd_plan(plan, out);
    if (c_design->parsed()) cmd_design(design, out, err);
    if (c_sim->parsed()) cmd_simulate(sim, out);
    if (c_plot->parsed()) cmd_curve_plot(plot, out);
  } catch (const Error& e) {
    err << "error " << error_class_name(e.kind()) << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::input:
        return 2;
      case ErrorKind::numerical:
        return 3;
      case ErrorKind::infeasible:
        return 4;
    }
  } catch (const std::exception& e) {
    err << "error " << error_class_name(ErrorKind::input) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace lcurve::cli
