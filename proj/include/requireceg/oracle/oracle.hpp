#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "requireceg/errors.hpp"
#include "requireceg/text.hpp"

namespace requireceg::oracle {

using json = nlohmann::json;

/// One request to a text-generation backend. `agent` names the pipeline step
/// (FeatureTreeGenerator, BuildCEG, ...). `inputs` carries the structured
/// values the prompt was rendered from, for logging and fixture matching.
struct OracleRequest {
  std::string agent;
  std::string prompt;
  json inputs = json::object();

  /// Stable hash of agent and prompt text.
  std::string fingerprint() const { return text::hex64(text::fnv1a64(agent + '\0' + prompt)); }
};

struct OracleConfig {
  double temperature = 0.5;
  int timeout_seconds = 60;
  int retries = 2;  // extra attempts after a transport failure or timeout
};

/// Backends must be safe to call from several threads at once.
class Oracle {
 public:
  virtual ~Oracle() = default;

  /// Raw answer text. Throws OracleFailure on transport problems.
  virtual std::string complete(const OracleRequest& request) = 0;

  const OracleConfig& config() const noexcept { return config_; }
  void set_config(OracleConfig c) noexcept { config_ = c; }

 private:
  OracleConfig config_;
};

/// Answers from a callable; handy for tests.
class FunctionOracle : public Oracle {
 public:
  using Fn = std::function<std::string(const OracleRequest&)>;
  explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const OracleRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

/// Calls the oracle, retrying transport failures and timeouts up to
/// config().retries extra times. Schema problems are never retried here.
inline std::string complete_with_retries(Oracle& oracle, const OracleRequest& request) {
  int attempts = 1 + std::max(0, oracle.config().retries);
  for (int i = 1;; ++i) {
    try {
      return oracle.complete(request);
    } catch (const OracleFailure& e) {
      bool transient = e.reason() == OracleFailure::Reason::Transport || e.reason() == OracleFailure::Reason::Timeout;
      if (!transient || i >= attempts) throw;
    }
  }
}

/// Strict extraction: the answer must be a JSON object, either bare or as the
/// only content of one ```json fenced block. Anything else is Malformed.
inline json extract_json(std::string_view answer) {
  std::string_view t = text::trim_view(answer);
  if (t.empty()) throw OracleFailure(OracleFailure::Reason::Empty, "answer is empty");
  if (t.starts_with("```")) {
    std::size_t nl = t.find('\n');
    std::string_view lang = nl == std::string_view::npos ? t.substr(3) : text::trim_view(t.substr(3, nl - 3));
    if (nl == std::string_view::npos || !(lang.empty() || lang == "json") || !t.ends_with("```") || t.size() < nl + 4)
      throw OracleFailure(OracleFailure::Reason::Malformed, "fenced answer is not a single json block");
    t = text::trim_view(t.substr(nl + 1, t.size() - nl - 4));
    if (t.find("```") != std::string_view::npos)
      throw OracleFailure(OracleFailure::Reason::Malformed, "answer holds more than one fenced block");
  }
  json j = json::parse(t, nullptr, false);
  if (j.is_discarded()) throw OracleFailure(OracleFailure::Reason::Malformed, "answer is not valid JSON");
  if (!j.is_object()) throw OracleFailure(OracleFailure::Reason::Malformed, "answer must be a JSON object");
  return j;
}

/// complete_with_retries + extract_json.
inline json ask_json(Oracle& oracle, const OracleRequest& request) {
  return extract_json(complete_with_retries(oracle, request));
}

/// Required string field of an answer; missing, non-string or blank values
/// are Malformed.
inline std::string require_string(const json& j, const char* key, const std::string& agent) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || text::trim_view(it->get_ref<const std::string&>()).empty())
    throw OracleFailure(OracleFailure::Reason::Malformed, agent + " answer needs a non-empty string field '" + key + "'");
  return it->get<std::string>();
}

}  // namespace requireceg::oracle
