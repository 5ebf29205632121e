/// @file diversity.hpp
/// @brief FURPS categorization of features and the Shannon entropy of the
/// resulting distribution.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/errors.hpp"
#include "requireceg/oracle/prompts.hpp"
#include "requireceg/text.hpp"

namespace requireceg::metrics {

enum class Furps { Functionality, Usability, Reliability, Performance, Supportability };

inline constexpr std::array<Furps, 5> kFurps{Furps::Functionality, Furps::Usability, Furps::Reliability,
                                             Furps::Performance, Furps::Supportability};

inline const char* furps_name(Furps f) noexcept {
  switch (f) {
    case Furps::Functionality: return "Functionality";
    case Furps::Usability: return "Usability";
    case Furps::Reliability: return "Reliability";
    case Furps::Performance: return "Performance";
    case Furps::Supportability: return "Supportability";
  }
  return "Functionality";
}

/// Case-insensitive; surrounding blanks are ignored.
inline std::optional<Furps> furps_from(std::string_view s) {
  std::string want = text::to_lower(text::trim(s));
  for (Furps f : kFurps)
    if (want == text::to_lower(furps_name(f))) return f;
  return std::nullopt;
}

/// Upper bound of the entropy over five categories.
inline const double kMaxEntropy = std::log2(5.0);

struct DiversityProfile {
  std::array<std::size_t, 5> category_counts{};
  double entropy = 0.0;

  std::size_t count(Furps f) const { return category_counts[static_cast<std::size_t>(f)]; }
};

struct CategorizedFeature {
  std::string name;
  Furps category = Furps::Functionality;
  bool defaulted = false;  // the oracle never gave a valid category
};

/// Entropy in bits from raw counts, with 0 log 0 taken as 0.
inline double entropy_bits(const std::array<std::size_t, 5>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

inline DiversityProfile diversity(const std::vector<CategorizedFeature>& features) {
  if (features.empty()) throw EmptyInput();
  DiversityProfile d;
  for (const auto& f : features) ++d.category_counts[static_cast<std::size_t>(f.category)];
  d.entropy = entropy_bits(d.category_counts);
  return d;
}

/// One ClassifyFURPS call per title. An unknown category earns one reprompt;
/// after that the title defaults to Functionality with `defaulted` set.
inline std::vector<CategorizedFeature> classify_furps(const std::vector<std::string>& titles, oracle::Oracle& oracle) {
  std::vector<CategorizedFeature> out;
  for (const auto& title : titles) {
    CategorizedFeature cf{title, Furps::Functionality, true};
    std::vector<std::string> problems;
    for (int attempt = 0; attempt < 2; ++attempt) {
      auto a = oracle::ask_agent(oracle, "ClassifyFURPS", {{"title", title}, {"feedback", oracle::feedback_block(problems)}});
      std::string got = oracle::require_string(a, "category", "ClassifyFURPS");
      if (auto f = furps_from(got)) {
        cf.category = *f;
        cf.defaulted = false;
        break;
      }
      problems = {"'" + got + "' is not one of Functionality, Usability, Reliability, Performance, Supportability"};
    }
    out.push_back(std::move(cf));
  }
  return out;
}

inline nlohmann::json to_json_value(const DiversityProfile& d) {
  nlohmann::json counts = nlohmann::json::object();
  for (Furps f : kFurps) counts[furps_name(f)] = d.count(f);
  return {{"category_counts", counts}, {"entropy", d.entropy}};
}

inline nlohmann::json to_json_value(const CategorizedFeature& c) {
  nlohmann::json j{{"feature", c.name}, {"category", furps_name(c.category)}};
  if (c.defaulted) j["defaulted"] = true;
  return j;
}

}  // namespace requireceg::metrics
