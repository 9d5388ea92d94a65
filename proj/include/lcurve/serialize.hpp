#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lcurve/design.hpp"
#include "lcurve/gam.hpp"
#include "lcurve/ols.hpp"
#include "lcurve/planner.hpp"

namespace lcurve {

/// Fingerprint of everything a report was computed from.
struct InputDigest {
  struct File {
    std::string path;
    std::uint64_t fnv1a = 0;
    friend bool operator==(const File&, const File&) = default;
  };
  std::vector<File> files;
  std::vector<std::uint64_t> seeds;

  void add_file(std::string path, std::string_view contents);
  friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

/// A fitted model of either family plus where it came from. The JSON form
/// carries a "model_family" discriminator: "ols_log" or "beta_gam".
struct ModelDocument {
  std::variant<LearningCurveModel, AdditiveModel> model;
  InputDigest inputs;
  std::vector<EliminationStep> elimination;

  MetricKind metric() const;
};

nlohmann::ordered_json to_json(const InputDigest& d);
InputDigest digest_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const LearningCurveModel& m);
nlohmann::ordered_json to_json(const AdditiveModel& m);

/// Pretty-printed JSON with a trailing newline. Parsing and re-serializing
/// reproduces the same bytes.
std::string serialize_model(const ModelDocument& doc);
ModelDocument parse_model(std::string_view text);

std::string serialize_manifest(const SamplingManifest& manifest, const InputDigest& inputs,
                               const std::optional<CoverageReport>& coverage = {});
SamplingManifest parse_manifest(std::string_view text);

nlohmann::ordered_json to_json(const PlanReport& report);

}  // namespace lcurve
