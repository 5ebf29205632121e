/// @file binding.hpp
/// @brief Maps Gherkin steps onto graph atoms.
///
/// Priority: a trailing `[C1]` / `[!C1]` annotation, then lexical overlap with
/// atom descriptions, then (optionally) the BindStep agent. A step nothing
/// matches stays unbound with a reason; binding never guesses.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "requireceg/ceg/graph.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/oracle/prompts.hpp"
#include "requireceg/text.hpp"

namespace requireceg::review {

enum class Polarity { Positive, Negative };
enum class BindMethod { Annotation, Lexical, Oracle };

inline const char* polarity_name(Polarity p) noexcept { return p == Polarity::Positive ? "positive" : "negative"; }

inline const char* method_name(BindMethod m) noexcept {
  switch (m) {
    case BindMethod::Annotation: return "annotation";
    case BindMethod::Lexical: return "lexical";
    case BindMethod::Oracle: return "oracle";
  }
  return "lexical";
}

inline constexpr double kLexicalThreshold = 0.5;

/// Background steps have no scenario index.
struct StepRef {
  std::optional<std::size_t> scenario;
  std::size_t step = 0;

  auto operator<=>(const StepRef&) const = default;
};

struct StepBinding {
  StepRef step;
  std::string atom;
  Polarity polarity = Polarity::Positive;
  double confidence = 0.0;
  BindMethod method = BindMethod::Lexical;
};

struct UnboundStep {
  StepRef step;
  std::string text;
  std::string reason;
};

namespace detail {

inline const std::set<std::string>& stop_words() {
  static const std::set<std::string> s{
      "a",    "an",    "the",   "is",    "are",  "was",   "were",  "be",    "been",  "being", "to",    "of",
      "in",   "on",    "at",    "by",    "for",  "with",  "and",   "or",    "that",  "this",  "these", "those",
      "it",   "its",   "has",   "have",  "had",  "will",  "shall", "should", "would", "can",  "could", "may",
      "must", "do",    "does",  "did",   "as",   "from",  "into",  "then",  "than",  "so",    "i",     "we",
      "they", "their", "there", "which", "who",  "when",  "if",    "true",  "s"};
  return s;
}

inline const std::set<std::string>& negation_cues() {
  static const std::set<std::string> s{"not", "no", "never", "cannot", "without"};
  return s;
}

inline std::string stem(std::string w) {
  for (std::string_view suf : {"ing", "ed", "es", "s"}) {
    if (w.size() >= suf.size() + 3 && w.ends_with(suf) && !(suf == "s" && w.ends_with("ss"))) {
      w.resize(w.size() - suf.size());
      break;
    }
  }
  return w;
}

struct Tokens {
  std::set<std::string> words;
  std::size_t negations = 0;
};

/// Lowercase words without punctuation or stop words, lightly stemmed, plus
/// the number of negation cues ("n't" counts as "not").
inline Tokens tokenize(std::string_view s) {
  std::string t = text::to_lower(s);
  t = text::replace_all(t, "n't", " not");
  t = text::replace_all(t, "n’t", " not");
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (negation_cues().count(cur)) ++out.negations;
    else if (!stop_words().count(cur)) out.words.insert(stem(cur));
    cur.clear();
  };
  for (char c : t) {
    if (std::isalnum(static_cast<unsigned char>(c))) cur += c;
    else flush();
  }
  flush();
  return out;
}

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.count(w);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

struct Annotation {
  std::string atom;
  bool negated = false;
  std::string rest;  // step text without the annotation
};

inline std::optional<Annotation> trailing_annotation(std::string_view text) {
  std::string_view t = text::rtrim_view(text);
  if (!t.ends_with("]")) return std::nullopt;
  std::size_t open = t.rfind('[');
  if (open == std::string_view::npos) return std::nullopt;
  std::string_view inner = t.substr(open + 1, t.size() - open - 2);
  Annotation a;
  if (inner.starts_with("!")) {
    a.negated = true;
    inner.remove_prefix(1);
  }
  if (!ceg::is_node_id(inner)) return std::nullopt;
  a.atom = std::string(inner);
  a.rest = text::trim(t.substr(0, open));
  return a;
}

inline ceg::NodeKind wanted_kind(gherkin::StepKind k) {
  return k == gherkin::StepKind::Action ? ceg::NodeKind::Effect : ceg::NodeKind::Condition;
}

}  // namespace detail

/// Result of binding one step: a binding or the reason there is none.
struct StepBindingResult {
  std::optional<StepBinding> binding;
  std::string reason;
};

/// Binds one step. Precondition and trigger steps bind to conditions, action
/// steps to effects.
inline StepBindingResult bind_step(const gherkin::Step& step, StepRef ref, const ceg::CausalEffectGraph& g,
                                   oracle::Oracle* oracle = nullptr) {
  const ceg::NodeKind want = detail::wanted_kind(step.kind);
  const char* want_name = ceg::node_kind_name(want);

  if (auto ann = detail::trailing_annotation(step.text)) {
    auto it = g.nodes.find(ann->atom);
    if (it == g.nodes.end()) return {std::nullopt, "annotation names undeclared atom " + ann->atom};
    if (it->second.kind != want)
      return {std::nullopt, std::string(gherkin::kind_name(step.kind)) + " step is annotated with " +
                                ceg::node_kind_name(it->second.kind) + " " + ann->atom + ", expected a " + want_name};
    return {StepBinding{ref, ann->atom, ann->negated ? Polarity::Negative : Polarity::Positive, 1.0,
                        BindMethod::Annotation},
            ""};
  }

  const detail::Tokens st = detail::tokenize(step.text);
  double best = -1.0;
  std::vector<const ceg::AtomicNode*> best_atoms;
  double best_other = 0.0;
  std::string best_other_id;
  for (const auto& [id, n] : g.nodes) {
    double score = detail::jaccard(st.words, detail::tokenize(n.description).words);
    if (n.kind != want) {
      if (score > best_other) {
        best_other = score;
        best_other_id = id;
      }
      continue;
    }
    if (score > best + 1e-12) {
      best = score;
      best_atoms = {&n};
    } else if (std::abs(score - best) <= 1e-12) {
      best_atoms.push_back(&n);
    }
  }
  std::string reason;
  if (best >= kLexicalThreshold && best_atoms.size() == 1) {
    const auto& n = *best_atoms.front();
    bool neg = (st.negations % 2) != (detail::tokenize(n.description).negations % 2);
    return {StepBinding{ref, n.id, neg ? Polarity::Negative : Polarity::Positive, best, BindMethod::Lexical}, ""};
  }
  if (best >= kLexicalThreshold) {
    std::vector<std::string> ids;
    for (const auto* n : best_atoms) ids.push_back(n->id);
    reason = "ambiguous between " + text::join(ids, ", ");
  } else if (best_other >= kLexicalThreshold) {
    reason = std::string(gherkin::kind_name(step.kind)) + " step reads like " +
             ceg::node_kind_name(g.node(best_other_id).kind) + " " + best_other_id + ", expected a " + want_name;
  } else {
    reason = std::string("no ") + want_name + " matches";
  }

  if (!oracle) return {std::nullopt, reason};
  std::string candidates;
  for (const auto& [id, n] : g.nodes)
    if (n.kind == want) candidates += id + ": " + n.description + "\n";
  oracle::json a = oracle::ask_agent(*oracle, "BindStep",
                             {{"step", std::string(gherkin::keyword_name(step.keyword)) + " " + step.text},
                              {"kind", gherkin::kind_name(step.kind)},
                              {"atoms", candidates}});
  if (!a.contains("atom") || a["atom"].is_null()) return {std::nullopt, reason + "; oracle found no atom"};
  if (!a["atom"].is_string()) throw OracleFailure(OracleFailure::Reason::Malformed, "BindStep 'atom' must be a string or null");
  std::string id = a["atom"].get<std::string>();
  auto it = g.nodes.find(id);
  if (it == g.nodes.end() || it->second.kind != want)
    return {std::nullopt, reason + "; oracle proposed " + id + ", which is not a declared " + want_name};
  std::string pol = a.value("polarity", "positive");
  if (pol != "positive" && pol != "negative")
    throw OracleFailure(OracleFailure::Reason::Malformed, "BindStep polarity must be positive or negative");
  return {StepBinding{ref, id, pol == "negative" ? Polarity::Negative : Polarity::Positive, kLexicalThreshold,
                      BindMethod::Oracle},
          ""};
}

/// Bindings of a whole document: `steps[i][j]` for scenario i, step j.
struct DocumentBindings {
  std::vector<std::optional<StepBinding>> background;
  std::vector<std::vector<std::optional<StepBinding>>> steps;
  std::vector<UnboundStep> unbound;

  /// Flat list of every binding, background first.
  std::vector<StepBinding> all() const {
    std::vector<StepBinding> out;
    for (const auto& b : background)
      if (b) out.push_back(*b);
    for (const auto& sc : steps)
      for (const auto& b : sc)
        if (b) out.push_back(*b);
    return out;
  }
};

inline std::vector<std::optional<StepBinding>> bind_scenario_steps(const std::vector<gherkin::Step>& steps,
                                                                   std::optional<std::size_t> scenario,
                                                                   const ceg::CausalEffectGraph& g, oracle::Oracle* oracle,
                                                                   std::vector<UnboundStep>* unbound = nullptr) {
  std::vector<std::optional<StepBinding>> out;
  for (std::size_t j = 0; j < steps.size(); ++j) {
    StepRef ref{scenario, j};
    auto r = bind_step(steps[j], ref, g, oracle);
    if (!r.binding && unbound) unbound->push_back({ref, steps[j].text, r.reason});
    out.push_back(std::move(r.binding));
  }
  return out;
}

inline DocumentBindings bind_steps(const gherkin::GherkinDocument& doc, const ceg::CausalEffectGraph& g,
                                   oracle::Oracle* oracle = nullptr) {
  DocumentBindings d;
  if (doc.background) d.background = bind_scenario_steps(doc.background->steps, std::nullopt, g, oracle, &d.unbound);
  for (std::size_t i = 0; i < doc.scenarios.size(); ++i)
    d.steps.push_back(bind_scenario_steps(doc.scenarios[i].steps, i, g, oracle, &d.unbound));
  return d;
}

}  // namespace requireceg::review
