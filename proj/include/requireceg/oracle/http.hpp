#pragma once

#include <cstdlib>
#include <string>

#include <httplib.h>

#include "requireceg/oracle/oracle.hpp"

namespace requireceg::oracle {

struct HttpEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/chat/completions
};

inline HttpEndpoint split_endpoint(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint must start with http:// or https://: " + url);
  std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

/// OpenAI-style chat completion client: one user message per request, the
/// answer is choices[0].message.content.
class HttpOracle : public Oracle {
 public:
  HttpOracle(std::string endpoint, std::string model, std::string api_key)
      : endpoint_(split_endpoint(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)) {}

  std::string complete(const OracleRequest& request) override {
    httplib::Client cli(endpoint_.base);
    if (!cli.is_valid()) throw OracleFailure(OracleFailure::Reason::Transport, "cannot use endpoint " + endpoint_.base);
    cli.set_connection_timeout(config().timeout_seconds, 0);
    cli.set_read_timeout(config().timeout_seconds, 0);
    cli.set_write_timeout(config().timeout_seconds, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    json body = {
        {"model", model_},
        {"temperature", config().temperature},
        {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
    };
    auto res = cli.Post(endpoint_.path, headers, body.dump(), "application/json");
    if (!res) {
      auto err = res.error();
      auto reason = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) ? OracleFailure::Reason::Timeout
                                                                                              : OracleFailure::Reason::Transport;
      throw OracleFailure(reason, endpoint_.base + ": " + httplib::to_string(err));
    }
    if (res->status != 200)
      throw OracleFailure(OracleFailure::Reason::Transport, endpoint_.base + " answered HTTP " + std::to_string(res->status));
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
      throw OracleFailure(OracleFailure::Reason::Malformed, "completion response has no choices");
    const json& msg = j["choices"][0]["message"];
    if (!msg.is_object() || !msg.contains("content") || !msg["content"].is_string())
      throw OracleFailure(OracleFailure::Reason::Malformed, "completion response has no message content");
    return msg["content"].get<std::string>();
  }

 private:
  HttpEndpoint endpoint_;
  std::string model_;
  std::string api_key_;
};

}  // namespace requireceg::oracle
