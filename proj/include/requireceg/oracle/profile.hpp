#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "requireceg/oracle/http.hpp"
#include "requireceg/oracle/mock.hpp"
#include "requireceg/oracle/oracle.hpp"

namespace requireceg::oracle {

/// Backend selection, usually read from a JSON profile file.
struct OracleProfile {
  std::string provider = "mock";  // "mock" or "http"
  std::string endpoint;
  std::string model;
  std::string api_key_env;
  std::filesystem::path fixture_dir;
  OracleConfig config;
};

/// Relative fixture paths are resolved against `base_dir`.
inline OracleProfile profile_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  OracleProfile p;
  p.provider = j.value("provider", "mock");
  p.endpoint = j.value("endpoint", "");
  p.model = j.value("model", "");
  p.api_key_env = j.value("api_key_env", "");
  p.config.temperature = j.value("temperature", 0.5);
  p.config.timeout_seconds = j.value("timeout_seconds", 60);
  p.config.retries = j.value("retries", 2);
  if (j.contains("fixture_dir")) {
    std::filesystem::path d = j.at("fixture_dir").get<std::string>();
    p.fixture_dir = d.is_absolute() || base_dir.empty() ? d : base_dir / d;
  }
  if (p.provider != "mock" && p.provider != "http") throw ConfigError("unknown oracle provider '" + p.provider + "'");
  if (p.provider == "http" && p.endpoint.empty()) throw ConfigError("http oracle profile needs an endpoint");
  if (p.provider == "mock" && p.fixture_dir.empty()) throw ConfigError("mock oracle profile needs a fixture_dir");
  if (p.config.timeout_seconds <= 0 || p.config.retries < 0) throw ConfigError("timeout must be positive and retries non-negative");
  return p;
}

inline OracleProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read oracle profile " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("oracle profile is not a JSON object: " + path.string());
  return profile_from_json(j, path.parent_path());
}

inline std::unique_ptr<Oracle> make_oracle(const OracleProfile& p) {
  std::unique_ptr<Oracle> o;
  if (p.provider == "mock") {
    o = std::make_unique<FixtureOracle>(FixtureOracle::from_directory(p.fixture_dir));
  } else {
    std::string key;
    if (!p.api_key_env.empty()) {
      const char* v = std::getenv(p.api_key_env.c_str());
      if (v) key = v;
    }
    o = std::make_unique<HttpOracle>(p.endpoint, p.model, key);
  }
  OracleConfig c = p.config;
  if (p.provider == "mock") c.temperature = 0.0;
  o->set_config(c);
  return o;
}

}  // namespace requireceg::oracle
