/// @file config.hpp
/// @brief Run configuration and the dataset file format.
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/ceg/evaluate.hpp"
#include "requireceg/errors.hpp"
#include "requireceg/oracle/profile.hpp"
#include "requireceg/text.hpp"

namespace requireceg::pipeline {

using json = nlohmann::json;

struct PipelineConfig {
  std::filesystem::path oracle_profile;  // JSON profile file
  std::size_t max_iters = 5;
  std::size_t enumeration_cap = ceg::kDefaultEnumerationCap;
  std::filesystem::path output_dir = "out";
  std::size_t per_feature_parallelism = 1;
  bool review_uses_oracle = true;  // BindStep fallback and rewording during review
  bool reword = true;
  bool synthesize = true;
  std::size_t review_rounds = 5;

  void validate() const {
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (enumeration_cap < 1 || enumeration_cap > 62) throw ConfigError("enumeration_cap must be within 1..62");
    if (per_feature_parallelism < 1) throw ConfigError("per_feature_parallelism must be at least 1");
    if (review_rounds < 1) throw ConfigError("review_rounds must be at least 1");
    if (oracle_profile.empty()) throw ConfigError("config needs an oracle_profile");
  }
};

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
}

namespace detail {

template <typename T>
T read_count(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(std::string(key) + " must be a non-negative integer");
  return static_cast<T>(v.get<long long>());
}

inline bool read_flag(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(std::string(key) + " must be true or false");
  return j.at(key).get<bool>();
}

}  // namespace detail

/// Relative paths resolve against `base_dir` (the config file's directory).
inline PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  auto resolve = [&](const std::string& s) {
    std::filesystem::path p = s;
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  if (j.contains("oracle_profile")) c.oracle_profile = resolve(j.at("oracle_profile").get<std::string>());
  if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());
  c.max_iters = detail::read_count(j, "max_iters", c.max_iters);
  c.enumeration_cap = detail::read_count(j, "enumeration_cap", c.enumeration_cap);
  c.per_feature_parallelism = detail::read_count(j, "per_feature_parallelism", c.per_feature_parallelism);
  c.review_rounds = detail::read_count(j, "review_rounds", c.review_rounds);
  c.review_uses_oracle = detail::read_flag(j, "review_uses_oracle", c.review_uses_oracle);
  c.reword = detail::read_flag(j, "reword", c.reword);
  c.synthesize = detail::read_flag(j, "synthesize", c.synthesize);
  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
  return config_from_json(j, path.parent_path());
}

/// Snapshot for manifests. Paths are written as file names only so that the
/// same run in another directory produces the same manifest.
inline json to_json_value(const PipelineConfig& c) {
  return {{"oracle_profile", c.oracle_profile.filename().string()},
          {"max_iters", c.max_iters},
          {"enumeration_cap", c.enumeration_cap},
          {"per_feature_parallelism", c.per_feature_parallelism},
          {"review_uses_oracle", c.review_uses_oracle},
          {"reword", c.reword},
          {"synthesize", c.synthesize},
          {"review_rounds", c.review_rounds}};
}

struct DatasetEntry {
  std::string project_id;
  std::string narrative;
  std::vector<std::string> reference_features;
};

struct SkippedEntry {
  std::size_t index = 0;
  std::string reason;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
  std::vector<SkippedEntry> skipped;
};

/// Reads one entry; returns the reason it is unusable, or "" when it is fine.
inline std::string entry_from_json(const json& j, DatasetEntry& e) {
  if (!j.is_object()) return "entry is not an object";
  if (!j.contains("project_id") || !j["project_id"].is_string() || text::trim_view(j["project_id"].get_ref<const std::string&>()).empty())
    return "missing 'project_id'";
  if (!j.contains("narrative")) return "missing 'narrative'";
  if (!j["narrative"].is_string() || text::trim_view(j["narrative"].get_ref<const std::string&>()).empty())
    return "'narrative' must be non-empty text";
  e.project_id = j["project_id"].get<std::string>();
  e.narrative = j["narrative"].get<std::string>();
  e.reference_features.clear();
  if (j.contains("features")) {
    if (!j["features"].is_array()) return "'features' must be a list of feature texts";
    for (const auto& f : j["features"]) {
      if (!f.is_string()) return "'features' must be a list of feature texts";
      e.reference_features.push_back(f.get<std::string>());
    }
  }
  return "";
}

/// A dataset is a JSON list of entries, an object with an "entries" list, or
/// one entry object. Malformed entries are skipped with a reason.
inline Dataset dataset_from_json(const json& j) {
  json list;
  if (j.is_array()) list = j;
  else if (j.is_object() && j.contains("entries") && j["entries"].is_array()) list = j["entries"];
  else if (j.is_object()) list = json::array({j});
  else throw ConfigError("dataset must be a list of entries");
  Dataset d;
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    DatasetEntry e;
    std::string why = entry_from_json(list[i], e);
    if (why.empty() && std::find(seen.begin(), seen.end(), text::slugify(e.project_id)) != seen.end())
      why = "duplicate project_id '" + e.project_id + "'";
    if (!why.empty()) {
      d.skipped.push_back({i, why});
      continue;
    }
    seen.push_back(text::slugify(e.project_id));
    d.entries.push_back(std::move(e));
  }
  return d;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("dataset is not valid JSON: " + path.string());
  return dataset_from_json(j);
}

}  // namespace requireceg::pipeline
