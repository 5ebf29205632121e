/// @file reference.hpp
/// @brief Coverage against a reference feature set, from human labels.
///
/// Nothing is matched automatically. A label file records, for every
/// generated feature, whether some reference function covers it, and for
/// every reference function, whether some generated feature covers it:
///
///     {"generated": {"<feature slug>": {"covered": "Yes", "justification": "..."}},
///      "reference": {"<function name>": {"covered": "No", "justification": "..."}}}
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/errors.hpp"
#include "requireceg/pipeline/config.hpp"
#include "requireceg/pipeline/run.hpp"

namespace requireceg::pipeline {

struct CoverageSummary {
  std::size_t generated_total = 0;
  std::size_t generated_covered = 0;
  std::size_t reference_total = 0;
  std::size_t reference_covered = 0;
  double cover_our = 0.0;        // covered generated / labeled generated
  double cover_real_func = 0.0;  // covered reference / labeled reference
  std::vector<std::string> unlabeled;  // manifest features with no label
  std::vector<std::string> unknown;    // labels for features the manifest lacks
};

namespace detail {

inline bool label_yes(const json& v, const std::string& key) {
  std::string s;
  if (v.is_string()) s = v.get<std::string>();
  else if (v.is_object() && v.contains("covered") && v["covered"].is_string()) s = v["covered"].get<std::string>();
  else throw ConfigError("label for '" + key + "' needs covered: Yes or No");
  s = text::to_lower(text::trim(s));
  if (s != "yes" && s != "no") throw ConfigError("label for '" + key + "' must be Yes or No, got '" + s + "'");
  return s == "yes";
}

}  // namespace detail

inline CoverageSummary coverage_from_labels(const json& labels, const RunManifest* manifest = nullptr) {
  if (!labels.is_object()) throw ConfigError("label file must be a JSON object");
  CoverageSummary c;
  if (labels.contains("generated")) {
    for (const auto& [k, v] : labels["generated"].items()) {
      ++c.generated_total;
      c.generated_covered += detail::label_yes(v, k);
    }
  }
  if (labels.contains("reference")) {
    for (const auto& [k, v] : labels["reference"].items()) {
      ++c.reference_total;
      c.reference_covered += detail::label_yes(v, k);
    }
  }
  if (c.generated_total) c.cover_our = static_cast<double>(c.generated_covered) / static_cast<double>(c.generated_total);
  if (c.reference_total)
    c.cover_real_func = static_cast<double>(c.reference_covered) / static_cast<double>(c.reference_total);
  if (manifest) {
    const json gen = labels.value("generated", json::object());
    for (const auto& f : manifest->features)
      if (!gen.contains(f.slug)) c.unlabeled.push_back(f.slug);
    for (const auto& [k, v] : gen.items()) {
      bool known = false;
      for (const auto& f : manifest->features) known = known || f.slug == k;
      if (!known) c.unknown.push_back(k);
    }
  }
  return c;
}

inline CoverageSummary compare_against_reference(const RunManifest& manifest, const std::filesystem::path& label_file) {
  if (!std::filesystem::is_regular_file(label_file)) throw LabelFileMissing(label_file.string());
  json j = json::parse(read_text_file(label_file), nullptr, false);
  if (j.is_discarded()) throw ConfigError("label file is not valid JSON: " + label_file.string());
  return coverage_from_labels(j, &manifest);
}

inline json to_json_value(const CoverageSummary& c) {
  return {{"cover_our", c.cover_our},
          {"cover_real_func", c.cover_real_func},
          {"generated", {{"covered", c.generated_covered}, {"total", c.generated_total}}},
          {"reference", {{"covered", c.reference_covered}, {"total", c.reference_total}}},
          {"unlabeled", c.unlabeled},
          {"unknown", c.unknown}};
}

}  // namespace requireceg::pipeline
