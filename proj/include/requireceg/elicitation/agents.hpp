/// @file agents.hpp
/// @brief Oracle-backed elicitation steps from a leaf feature to a draft
/// feature file and an unchecked cause-effect graph.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "requireceg/ceg/formal_check.hpp"
#include "requireceg/ceg/graph.hpp"
#include "requireceg/elicitation/feature_tree.hpp"
#include "requireceg/errors.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/gherkin/parser.hpp"
#include "requireceg/oracle/prompts.hpp"
#include "requireceg/text.hpp"

namespace requireceg::elicitation {

struct BehaviorRequirement {
  std::string feature;  // leaf path, "L1 > L2 > leaf"
  std::string user_behavior;
  std::string system_behavior;
  std::vector<std::string> warnings;
};

namespace detail {

inline const std::set<std::string>& stop_words() {
  static const std::set<std::string> s{"a",    "an",   "the",  "is",   "are",  "be",   "to",   "of",   "and",
                                       "or",   "if",   "in",   "on",   "for",  "it",   "its",  "this", "that",
                                       "with", "as",   "at",   "by",   "from", "then", "when", "will", "should",
                                       "can",  "has",  "have", "was",  "were", "they", "their", "user", "users",
                                       "system", "i", "me", "my", "any", "all", "which", "into", "so"};
  return s;
}

inline std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() > 2 && !stop_words().count(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else flush();
  }
  flush();
  return out;
}

inline std::vector<std::string> sentences(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    cur += c;
    if (c == '.' || c == '!' || c == '?' || c == '\n') {
      if (!text::trim_view(cur).empty()) out.push_back(text::trim(cur));
      cur.clear();
    }
  }
  if (!text::trim_view(cur).empty()) out.push_back(text::trim(cur));
  return out;
}

}  // namespace detail

/// Lexical check that the system behavior answers every user trigger: each
/// user sentence must share at least one content word with the system text.
inline std::vector<std::string> trigger_coverage_warnings(const std::string& user_behavior,
                                                          const std::string& system_behavior) {
  auto sys = detail::content_words(system_behavior);
  std::set<std::string> sys_set(sys.begin(), sys.end());
  std::vector<std::string> out;
  for (const auto& s : detail::sentences(user_behavior)) {
    auto words = detail::content_words(s);
    if (words.empty()) continue;
    bool hit = false;
    for (const auto& w : words) hit = hit || sys_set.count(w);
    if (!hit) out.push_back("system behavior does not mention the trigger: " + s);
  }
  return out;
}

inline std::string elicit_user_behavior(const LeafRef& leaf, const std::string& narrative, oracle::Oracle& oracle) {
  if (!leaf.node || !leaf.node->is_leaf()) throw PreconditionViolation("user behavior is elicited for leaf features only");
  if (text::trim_view(narrative).empty()) throw PreconditionViolation("narrative is empty");
  json a = oracle::ask_agent(oracle, "AnalyzeUserBehavior",
                             {{"feature", leaf.node->name},
                              {"path", leaf.path_text()},
                              {"narrative_span", leaf.node->narrative_span.value_or("(none)")},
                              {"narrative", narrative}});
  return oracle::require_string(a, "user_behavior", "AnalyzeUserBehavior");
}

inline std::string elicit_system_behavior(const std::string& user_behavior, oracle::Oracle& oracle,
                                          const std::string& feature = "") {
  if (text::trim_view(user_behavior).empty()) throw PreconditionViolation("user behavior is empty");
  json a = oracle::ask_agent(oracle, "AnalyzeSystemBehavior", {{"feature", feature}, {"user_behavior", user_behavior}});
  return oracle::require_string(a, "system_behavior", "AnalyzeSystemBehavior");
}

struct AtomsResult {
  std::vector<ceg::AtomicNode> atoms;  // conditions first, then effects, in answer order
  std::vector<std::string> log;
};

/// Reads an IdentifyCAndE answer. Problems that a reprompt could fix go to
/// `problems`; descriptions repeated within a kind are merged into the first
/// atom that uses them and noted in `log`.
inline AtomsResult atoms_from_json(const json& j, std::vector<std::string>& problems) {
  AtomsResult r;
  std::set<std::string> ids;
  for (auto kind : {ceg::NodeKind::Condition, ceg::NodeKind::Effect}) {
    const char* key = kind == ceg::NodeKind::Condition ? "conditions" : "effects";
    if (!j.contains(key) || !j[key].is_array()) {
      problems.push_back(std::string("answer needs a '") + key + "' list");
      continue;
    }
    std::map<std::string, std::string> by_description;
    for (const auto& e : j[key]) {
      std::string id = e.is_object() ? text::trim(e.value("id", "")) : "";
      std::string desc = e.is_object() ? text::trim(e.value("description", "")) : "";
      if (!ceg::is_node_id(id) || ceg::kind_of_id(id) != kind) {
        problems.push_back("'" + id + "' is not a valid " + ceg::node_kind_name(kind) + " id");
        continue;
      }
      if (!ids.insert(id).second) {
        problems.push_back("id " + id + " is used twice");
        continue;
      }
      if (desc.empty()) {
        problems.push_back(id + " has no description");
        continue;
      }
      std::string norm = text::to_lower(desc);
      if (auto it = by_description.find(norm); it != by_description.end()) {
        r.log.push_back("merged " + id + " into " + it->second + " (same description)");
        continue;
      }
      by_description[norm] = id;
      bool trigger = kind == ceg::NodeKind::Condition && e.value("trigger", false);
      r.atoms.push_back({id, kind, desc, trigger});
    }
  }
  bool any_c = false, any_e = false;
  for (const auto& a : r.atoms) (a.kind == ceg::NodeKind::Condition ? any_c : any_e) = true;
  if (problems.empty() && (!any_c || !any_e)) problems.push_back("answer needs at least one condition and one effect");
  return r;
}

inline AtomsResult identify_atoms(const std::string& system_behavior, oracle::Oracle& oracle) {
  if (text::trim_view(system_behavior).empty()) throw PreconditionViolation("system behavior is empty");
  std::vector<std::string> problems;
  for (int attempt = 0; attempt < 2; ++attempt) {
    json a = oracle::ask_agent(oracle, "IdentifyCAndE",
                               {{"system_behavior", system_behavior}, {"feedback", oracle::feedback_block(problems)}});
    problems.clear();
    AtomsResult r = atoms_from_json(a, problems);
    if (problems.empty()) return r;
  }
  throw ValidationFailure(ValidationFailure::Stage::Atoms, text::join(problems, "; "));
}

/// Atom declarations in DSL form, one per line.
inline std::string atoms_text(const std::vector<ceg::AtomicNode>& atoms) {
  std::string out;
  for (const auto& a : atoms) out += ceg::declaration_text(a) + "\n";
  return out;
}

struct BuildResult {
  std::vector<std::string> raw_statements;
  ceg::AssembleResult assembled;  // graph plus the formal errors, not yet repaired
  std::vector<std::string> log;
};

inline std::vector<std::string> statements_from_json(const json& a, const std::string& agent) {
  if (!a.contains("statements") || !a["statements"].is_array())
    throw OracleFailure(OracleFailure::Reason::Malformed, agent + " answer needs a 'statements' list");
  std::vector<std::string> out;
  for (const auto& s : a["statements"]) {
    if (!s.is_string()) throw OracleFailure(OracleFailure::Reason::Malformed, agent + " statements must be strings");
    std::string t = text::trim(s.get<std::string>());
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

inline BuildResult build_ceg(const std::vector<ceg::AtomicNode>& atoms, const std::string& system_behavior,
                             oracle::Oracle& oracle) {
  if (atoms.empty()) throw PreconditionViolation("build_ceg needs at least one atom");
  json a = oracle::ask_agent(oracle, "BuildCEG", {{"system_behavior", system_behavior}, {"atoms", atoms_text(atoms)}});
  BuildResult r;
  r.raw_statements = statements_from_json(a, "BuildCEG");
  r.assembled = ceg::assemble(atoms, r.raw_statements);
  if (r.raw_statements.empty()) r.log.push_back("vacuous graph: the oracle returned no statements");
  return r;
}

/// Asks GenerateGherkin for a feature file. The text must parse and carry a
/// narrative block; otherwise the problem is sent back once before failing.
inline gherkin::GherkinDocument draft_gherkin(const std::string& system_behavior, const FeatureNode& feature,
                                              oracle::Oracle& oracle) {
  if (text::trim_view(system_behavior).empty() || text::trim_view(feature.name).empty())
    throw PreconditionViolation("draft_gherkin needs a system behavior and a feature name");
  std::vector<std::string> problems;
  for (int attempt = 0; attempt < 2; ++attempt) {
    json a = oracle::ask_agent(oracle, "GenerateGherkin",
                               {{"feature", feature.name},
                                {"system_behavior", system_behavior},
                                {"feedback", oracle::feedback_block(problems)}});
    problems.clear();
    std::string source = oracle::require_string(a, "feature", "GenerateGherkin");
    try {
      gherkin::GherkinDocument doc = gherkin::parse_feature(source);
      if (!doc.narrative) problems.push_back("the feature has no Narrative block (As a / I want / So that)");
      if (doc.scenarios.empty()) problems.push_back("the feature has no scenarios");
      if (problems.empty()) return doc;
    } catch (const ParseError& e) {
      problems.push_back(e.what());
    }
  }
  throw ValidationFailure(ValidationFailure::Stage::Draft, text::join(problems, "; "));
}

}  // namespace requireceg::elicitation
