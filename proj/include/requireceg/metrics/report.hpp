/// @file report.hpp
/// @brief Per-project aggregation of keyword statistics, syntax accuracy,
/// readability, diversity and review counts.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/errors.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/gherkin/stats.hpp"
#include "requireceg/lint/lint.hpp"
#include "requireceg/metrics/diversity.hpp"
#include "requireceg/metrics/readability.hpp"
#include "requireceg/review/review.hpp"

namespace requireceg::metrics {

inline constexpr int kReportSchemaVersion = 1;

struct ReviewSummary {
  std::size_t kept = 0;
  std::size_t modified = 0;
  std::size_t added = 0;
  std::size_t unbindable = 0;
  std::size_t unresolved = 0;

  ReviewSummary& operator+=(const ReviewSummary& o) {
    kept += o.kept;
    modified += o.modified;
    added += o.added;
    unbindable += o.unbindable;
    unresolved += o.unresolved;
    return *this;
  }
};

inline ReviewSummary summarize(const review::ReviewReport& r) {
  return {r.kept.size(), r.modified.size(), r.added.size(), r.unbindable.size(), r.unresolved.size()};
}

/// Reads the "summary" object of a serialized review report.
inline ReviewSummary summary_from_json(const nlohmann::json& j) {
  const auto& s = j.at("summary");
  return {s.value("kept", std::size_t{0}), s.value("modified", std::size_t{0}), s.value("added", std::size_t{0}),
          s.value("unbindable", std::size_t{0}), s.value("unresolved", std::size_t{0})};
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  for (double x : xs) m.std += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(m.std / static_cast<double>(xs.size()));
  return m;
}

struct ProjectReport {
  gherkin::KeywordStats keyword_stats;
  lint::SyntaxAccuracy acc_syn;
  ReadabilityScores readability;  // over all feature texts joined
  MeanStd fog_per_feature;
  MeanStd linsear_per_feature;
  std::optional<DiversityProfile> diversity;  // needs an oracle
  std::vector<CategorizedFeature> categories;
  ReviewSummary review_summary;
};

/// `sources` are the serialized feature texts, parallel to `features`.
/// Diversity is computed when an oracle is given.
inline ProjectReport project_report(const std::vector<gherkin::GherkinDocument>& features,
                                    const std::vector<std::string>& sources, const std::vector<ReviewSummary>& reviews,
                                    oracle::Oracle* oracle = nullptr) {
  if (features.empty()) throw EmptyCorpus();
  ProjectReport r;
  r.keyword_stats = gherkin::keyword_stats(features, sources);
  r.acc_syn = lint::acc_syn(sources);
  std::string all;
  std::vector<double> fog, lin;
  for (const auto& s : sources) {
    all += s;
    if (!all.empty() && all.back() != '\n') all += '\n';
    if (text::trim_view(s).empty()) continue;
    auto rs = readability(s);
    fog.push_back(rs.gunning_fog);
    lin.push_back(rs.linsear_write);
  }
  if (!text::trim_view(all).empty()) r.readability = readability(all);
  r.fog_per_feature = mean_std(fog);
  r.linsear_per_feature = mean_std(lin);
  for (const auto& s : reviews) r.review_summary += s;
  if (oracle) {
    std::vector<std::string> titles;
    for (const auto& f : features) titles.push_back(f.feature_title);
    r.categories = classify_furps(titles, *oracle);
    r.diversity = diversity(r.categories);
  }
  return r;
}

inline nlohmann::json to_json_value(const gherkin::KeywordStats& s) {
  return {{"f_num", s.f_num},         {"avg_loc", s.avg_loc},       {"f_sce", s.f_sce},
          {"key_given", s.key_given}, {"key_when", s.key_when},     {"key_then", s.key_then},
          {"key_and", s.key_and},     {"key_but", s.key_but},       {"key_examples", s.key_examples},
          {"total_lines", s.total_lines}, {"total_scenarios", s.total_scenarios}};
}

inline nlohmann::json to_json_value(const ReviewSummary& s) {
  return {{"kept", s.kept}, {"modified", s.modified}, {"added", s.added}, {"unbindable", s.unbindable},
          {"unresolved", s.unresolved}};
}

inline nlohmann::json to_json_value(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

inline nlohmann::json to_json_value(const ProjectReport& r) {
  nlohmann::json j{{"schema_version", kReportSchemaVersion},
                   {"keyword_stats", to_json_value(r.keyword_stats)},
                   {"acc_syn", r.acc_syn},
                   {"readability", to_json_value(r.readability)},
                   {"readability_per_feature",
                    {{"gunning_fog", to_json_value(r.fog_per_feature)},
                     {"linsear_write", to_json_value(r.linsear_per_feature)}}},
                   {"review_summary", to_json_value(r.review_summary)},
                   {"diversity", nullptr}};
  if (r.diversity) {
    j["diversity"] = to_json_value(*r.diversity);
    j["diversity"]["features"] = nlohmann::json::array();
    for (const auto& c : r.categories) j["diversity"]["features"].push_back(to_json_value(c));
  }
  return j;
}

}  // namespace requireceg::metrics
