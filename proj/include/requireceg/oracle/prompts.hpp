#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "requireceg/errors.hpp"
#include "requireceg/oracle/oracle.hpp"
#include "requireceg/prompt_resources.hpp"

namespace requireceg::oracle {

/// Prompt template for an agent, from the templates compiled into the binary.
inline std::string_view prompt_template(std::string_view agent) {
  for (const auto& [name, body] : resources::kPrompts)
    if (name == agent) return body;
  throw PreconditionViolation("no prompt template for agent " + std::string(agent));
}

/// Replaces every `{{key}}` with vars[key]. A placeholder without a value is a
/// programming error, so it throws rather than leaving braces in the prompt.
inline std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw PreconditionViolation("unterminated placeholder in prompt template");
    out.append(tmpl.substr(pos, open - pos));
    std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = vars.find(key);
    if (it == vars.end()) throw PreconditionViolation("prompt variable '" + key + "' has no value");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

inline std::string render(std::string_view agent, const std::map<std::string, std::string>& vars) {
  return render_template(prompt_template(agent), vars);
}

/// Renders the agent's template, asks the oracle and returns the answer
/// object. The variables travel along as request inputs for logging.
inline json ask_agent(Oracle& oracle, std::string_view agent, const std::map<std::string, std::string>& vars) {
  OracleRequest r;
  r.agent = std::string(agent);
  r.prompt = render(agent, vars);
  r.inputs = vars;
  return ask_json(oracle, r);
}

/// Text appended to a prompt when the previous answer was rejected.
inline std::string feedback_block(const std::vector<std::string>& problems) {
  if (problems.empty()) return "";
  std::string out = "\nYour previous answer was rejected:\n";
  for (const auto& p : problems) out += "- " + p + "\n";
  return out;
}

}  // namespace requireceg::oracle
