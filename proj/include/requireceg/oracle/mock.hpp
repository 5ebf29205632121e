#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "requireceg/oracle/oracle.hpp"

namespace requireceg::oracle {

/// A canned answer. A rule matches a request when the agent is equal, the
/// fingerprint (if given) is equal, and every `when_contains` string occurs in
/// the prompt. `fail` scripts a transport-level failure instead of an answer.
struct FixtureRule {
  std::string agent;
  std::optional<std::string> fingerprint;
  std::vector<std::string> when_contains;
  std::vector<std::string> unless_contains;
  std::string answer;
  std::optional<OracleFailure::Reason> fail;
  std::string origin;  // file the rule came from

  bool matches(const OracleRequest& r) const {
    if (agent != r.agent) return false;
    if (fingerprint && *fingerprint != r.fingerprint()) return false;
    for (const auto& s : when_contains)
      if (r.prompt.find(s) == std::string::npos) return false;
    for (const auto& s : unless_contains)
      if (r.prompt.find(s) != std::string::npos) return false;
    return true;
  }
};

inline FixtureRule rule_from_json(const json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("agent")) throw ConfigError(origin + ": fixture rule needs an 'agent'");
  FixtureRule r;
  r.origin = origin;
  r.agent = j.at("agent").get<std::string>();
  if (j.contains("fingerprint")) r.fingerprint = j.at("fingerprint").get<std::string>();
  if (j.contains("when_contains")) r.when_contains = j.at("when_contains").get<std::vector<std::string>>();
  if (j.contains("unless_contains")) r.unless_contains = j.at("unless_contains").get<std::vector<std::string>>();
  if (j.contains("fail")) {
    std::string f = j.at("fail").get<std::string>();
    if (f == "transport") r.fail = OracleFailure::Reason::Transport;
    else if (f == "timeout") r.fail = OracleFailure::Reason::Timeout;
    else if (f == "empty") r.fail = OracleFailure::Reason::Empty;
    else throw ConfigError(origin + ": unknown fail mode '" + f + "'");
  } else if (!j.contains("answer")) {
    throw ConfigError(origin + ": fixture rule needs an 'answer' or 'fail'");
  }
  if (j.contains("answer")) {
    const json& a = j.at("answer");
    r.answer = a.is_string() ? a.get<std::string>() : a.dump();
  }
  return r;
}

/// Deterministic oracle backed by fixture rules. The first matching rule wins;
/// rules are ordered by file name, then by position within a file.
class FixtureOracle : public Oracle {
 public:
  FixtureOracle() = default;
  explicit FixtureOracle(std::vector<FixtureRule> rules) : rules_(std::move(rules)) {}

  /// Loads every *.json file in `dir`. Each holds one rule or an array of rules.
  static FixtureOracle from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("fixture directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<FixtureRule> rules;
    for (const auto& f : files) {
      std::ifstream in(f);
      std::stringstream ss;
      ss << in.rdbuf();
      json j = json::parse(ss.str(), nullptr, false);
      if (j.is_discarded()) throw ConfigError("fixture file is not valid JSON: " + f.string());
      std::string origin = f.filename().string();
      if (j.is_array())
        for (const auto& r : j) rules.push_back(rule_from_json(r, origin));
      else rules.push_back(rule_from_json(j, origin));
    }
    return FixtureOracle(std::move(rules));
  }

  void add(FixtureRule r) { rules_.push_back(std::move(r)); }
  const std::vector<FixtureRule>& rules() const noexcept { return rules_; }

  std::string complete(const OracleRequest& request) override {
    for (const auto& r : rules_) {
      if (!r.matches(request)) continue;
      if (r.fail) throw OracleFailure(*r.fail, "scripted failure (" + r.origin + ")");
      return r.answer;
    }
    throw OracleFailure(OracleFailure::Reason::NoFixture,
                        "no fixture for agent " + request.agent + " (fingerprint " + request.fingerprint() + ")");
  }

 private:
  std::vector<FixtureRule> rules_;
};

}  // namespace requireceg::oracle
