/// @file heal.hpp
/// @brief Semantic check of intervention questions and the self-healing loop
/// that repairs a graph first formally, then semantically.
#pragma once

#include <algorithm>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/ceg/formal_check.hpp"
#include "requireceg/ceg/graph.hpp"
#include "requireceg/elicitation/agents.hpp"
#include "requireceg/errors.hpp"
#include "requireceg/intervention/questions.hpp"
#include "requireceg/oracle/prompts.hpp"

namespace requireceg::intervention {

using json = nlohmann::json;

enum class Verdict { Yes, No };

struct OracleAnswer {
  Verdict verdict = Verdict::Yes;
  std::string reasoning;
};

struct IssueRecord {
  std::string condition;
  InterventionQuestion question;
  std::vector<std::string> statements;
  std::string oracle_reasoning;
};

/// Reasoning must be present and non-blank; the verdict is Yes or No in any
/// letter case. Everything else is a malformed answer.
inline OracleAnswer parse_answer(const json& j) {
  OracleAnswer a;
  a.reasoning = oracle::require_string(j, "reasoning", "ReasoningIQ");
  std::string v = text::to_lower(text::trim(oracle::require_string(j, "verdict", "ReasoningIQ")));
  if (v == "yes") a.verdict = Verdict::Yes;
  else if (v == "no") a.verdict = Verdict::No;
  else throw OracleFailure(OracleFailure::Reason::Malformed, "ReasoningIQ verdict must be Yes or No, got '" + v + "'");
  return a;
}

/// Asks the check question for every IQ. A "No" becomes an issue; the result
/// is ordered by condition id.
inline std::vector<IssueRecord> semantic_check(const std::string& requirement, const std::vector<InterventionQuestion>& iqs,
                                               oracle::Oracle& oracle) {
  std::vector<IssueRecord> out;
  for (const auto& q : iqs) {
    OracleAnswer a = parse_answer(
        oracle::ask_agent(oracle, "ReasoningIQ", {{"requirement", requirement}, {"question", q.rendered_question}}));
    if (a.verdict == Verdict::No) out.push_back({q.intervened_condition, q, q.affected_statements, a.reasoning});
  }
  std::stable_sort(out.begin(), out.end(), [](const IssueRecord& x, const IssueRecord& y) {
    return std::tie(x.condition, x.question.iq_id) < std::tie(y.condition, y.question.iq_id);
  });
  return out;
}

struct FormalIteration {
  std::size_t iteration = 0;
  std::vector<std::string> statements;
  std::vector<ceg::FormalError> errors;
  std::optional<std::vector<std::string>> reconstruction;  // oracle output, when asked
};

struct SemanticIteration {
  std::size_t iteration = 0;
  std::vector<std::string> statements;
  std::vector<InterventionQuestion> questions;
  std::vector<IssueRecord> issues;
  std::optional<std::vector<std::string>> modification;  // oracle output, when asked
  std::vector<ceg::FormalError> modification_errors;     // non-empty means it was reverted
};

struct HealingLog {
  std::size_t max_iters = 5;
  std::vector<FormalIteration> formal;
  std::vector<SemanticIteration> semantic;
  bool converged = false;  // the last semantic pass raised no issues
  std::vector<IssueRecord> residual_issues;

  std::size_t size() const noexcept { return formal.size() + semantic.size(); }
  std::size_t reconstructions() const {
    std::size_t n = 0;
    for (const auto& f : formal) n += f.reconstruction.has_value();
    return n;
  }
  std::size_t modifications() const {
    std::size_t n = 0;
    for (const auto& s : semantic) n += s.modification.has_value();
    return n;
  }
};

struct HealResult {
  ceg::CausalEffectGraph graph;
  HealingLog log;
};

namespace detail {

inline std::string bullet_list(const std::vector<std::string>& xs) {
  if (xs.empty()) return "(none)\n";
  std::string out;
  for (const auto& x : xs) out += "- " + x + "\n";
  return out;
}

inline std::vector<std::string> accepted_texts(const ceg::AssembleResult& r) {
  std::vector<std::string> out;
  for (const auto& s : r.accepted) out.push_back(s.text);
  return out;
}

inline std::string issues_text(const std::vector<IssueRecord>& issues) {
  std::string out;
  for (const auto& i : issues) {
    out += "- condition " + i.condition + " switched off; statements: " + text::join(i.statements, ", ") + "\n";
    out += "  question: " + i.question.rendered_question + "\n";
    out += "  reasoning: " + i.oracle_reasoning + "\n";
  }
  return out;
}

}  // namespace detail

/// The self-healing loop. The formal phase checks the statements and, while
/// errors remain, asks ReconstructCEG for a corrected list; it throws
/// FormalLoopExhausted if the `max_iters`-th check still fails. The semantic
/// phase then builds intervention questions, asks the check question for each
/// and, while issues remain, asks ModifyCEG; after `max_iters` checks the
/// remaining issues are reported, not thrown. A modification that breaks the
/// formal rules is discarded and the previous graph kept.
inline HealResult heal(const std::string& requirement, const std::vector<ceg::AtomicNode>& atoms,
                       const std::vector<std::string>& raw_statements, oracle::Oracle& oracle, std::size_t max_iters = 5,
                       std::size_t cap = ceg::kDefaultEnumerationCap) {
  if (max_iters < 1) throw PreconditionViolation("max_iters must be at least 1");
  HealResult r;
  r.log.max_iters = max_iters;
  const ceg::NodeTable nodes = ceg::node_table(atoms);
  const std::string atoms_block = elicitation::atoms_text(atoms);

  std::vector<std::string> statements = raw_statements;
  ceg::AssembleResult current;
  for (std::size_t i = 1;; ++i) {
    current = ceg::assemble(nodes, statements);
    FormalIteration it{i, statements, current.errors, std::nullopt};
    if (current.errors.empty()) {
      r.log.formal.push_back(std::move(it));
      break;
    }
    if (i >= max_iters) {
      r.log.formal.push_back(std::move(it));
      throw FormalLoopExhausted(i, current.errors.size());
    }
    std::vector<std::string> errs;
    for (const auto& e : current.errors) errs.push_back(ceg::to_string(e));
    json a = oracle::ask_agent(oracle, "ReconstructCEG",
                               {{"requirement", requirement},
                                {"atoms", atoms_block},
                                {"statements", detail::bullet_list(detail::accepted_texts(current))},
                                {"errors", detail::bullet_list(errs)}});
    statements = elicitation::statements_from_json(a, "ReconstructCEG");
    it.reconstruction = statements;
    r.log.formal.push_back(std::move(it));
  }

  for (std::size_t i = 1;; ++i) {
    SemanticIteration it;
    it.iteration = i;
    it.statements = detail::accepted_texts(current);
    it.questions = construct_iqs(current.graph, cap);
    it.issues = semantic_check(requirement, it.questions, oracle);
    if (it.issues.empty()) {
      r.log.converged = true;
      r.log.semantic.push_back(std::move(it));
      break;
    }
    if (i >= max_iters) {
      r.log.residual_issues = it.issues;
      r.log.semantic.push_back(std::move(it));
      break;
    }
    json a = oracle::ask_agent(oracle, "ModifyCEG",
                               {{"requirement", requirement},
                                {"atoms", atoms_block},
                                {"statements", detail::bullet_list(it.statements)},
                                {"issues", detail::issues_text(it.issues)}});
    auto modified = elicitation::statements_from_json(a, "ModifyCEG");
    it.modification = modified;
    ceg::AssembleResult next = ceg::assemble(nodes, modified);
    if (next.errors.empty()) current = std::move(next);
    else it.modification_errors = next.errors;
    r.log.semantic.push_back(std::move(it));
  }
  r.graph = current.graph;
  return r;
}

inline HealResult heal(const std::string& requirement, const std::vector<ceg::AtomicNode>& atoms,
                       const ceg::CausalEffectGraph& graph, oracle::Oracle& oracle, std::size_t max_iters = 5,
                       std::size_t cap = ceg::kDefaultEnumerationCap) {
  std::vector<std::string> raw = graph.raw_statements;
  if (raw.empty()) raw = ceg::statement_texts(graph);
  return heal(requirement, atoms, raw, oracle, max_iters, cap);
}

inline json to_json_value(const ceg::FormalError& e) {
  return {{"kind", ceg::kind_name(e.kind)}, {"statement", e.statement_text}, {"detail", e.detail}};
}

inline json to_json_value(const IssueRecord& i) {
  return {{"condition", i.condition},
          {"iq_id", i.question.iq_id},
          {"statements", i.statements},
          {"question", i.question.rendered_question},
          {"reasoning", i.oracle_reasoning}};
}

inline json to_json_value(const HealingLog& log) {
  json j{{"max_iters", log.max_iters},
         {"converged", log.converged},
         {"reconstructions", log.reconstructions()},
         {"modifications", log.modifications()},
         {"formal_iterations", json::array()},
         {"semantic_iterations", json::array()},
         {"residual_issues", json::array()}};
  for (const auto& f : log.formal) {
    json e{{"iteration", f.iteration}, {"statements", f.statements}, {"errors", json::array()}};
    for (const auto& err : f.errors) e["errors"].push_back(to_json_value(err));
    e["reconstruction"] = f.reconstruction ? json(*f.reconstruction) : json(nullptr);
    j["formal_iterations"].push_back(std::move(e));
  }
  for (const auto& s : log.semantic) {
    json e{{"iteration", s.iteration}, {"statements", s.statements}, {"questions", json::array()}, {"issues", json::array()}};
    for (const auto& q : s.questions) e["questions"].push_back(to_json_value(q));
    for (const auto& i : s.issues) e["issues"].push_back(to_json_value(i));
    e["modification"] = s.modification ? json(*s.modification) : json(nullptr);
    if (!s.modification_errors.empty()) {
      e["reverted"] = true;
      e["modification_errors"] = json::array();
      for (const auto& err : s.modification_errors) e["modification_errors"].push_back(to_json_value(err));
    }
    j["semantic_iterations"].push_back(std::move(e));
  }
  for (const auto& i : log.residual_issues) j["residual_issues"].push_back(to_json_value(i));
  return j;
}

}  // namespace requireceg::intervention
