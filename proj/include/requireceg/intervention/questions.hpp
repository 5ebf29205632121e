/// @file questions.hpp
/// @brief Intervention questions: switch one condition off, see which
/// statements of the graph change, and phrase the consequence so that a
/// reader of the requirement can confirm or reject it.
#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/ceg/evaluate.hpp"
#include "requireceg/ceg/graph.hpp"
#include "requireceg/text.hpp"

namespace requireceg::intervention {

using ceg::TruthAssignment;

struct EffectChange {
  bool before = false;
  bool after = false;

  bool operator==(const EffectChange&) const = default;
};

struct InterventionQuestion {
  std::string iq_id;  // "IQ-<condition>"
  std::string intervened_condition;
  std::vector<std::string> affected_statements;  // links first, then constraints
  TruthAssignment baseline;
  TruthAssignment intervened;
  std::map<std::string, EffectChange> expected_effect_changes;  // changed effects only
  std::vector<std::string> link_questions;                      // one per affected link
  std::vector<std::string> constraint_notes;                    // constraint changes, context only
  std::string rendered_question;
  std::optional<std::string> baseline_note;  // set when the all-true baseline was replaced
};

namespace detail {

inline std::string lower_first(std::string s) {
  if (s.size() >= 2 && std::isupper(static_cast<unsigned char>(s[0])) && std::islower(static_cast<unsigned char>(s[1])))
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

inline std::string strip_period(std::string s) {
  while (!s.empty() && (s.back() == '.' || text::is_space(s.back()))) s.pop_back();
  return s;
}

inline std::string phrase(const ceg::CausalEffectGraph& g, const std::string& id) {
  return lower_first(strip_period(g.node(id).description));
}

/// Baseline for probing condition `c`: all conditions true when that is
/// consistent, else the first consistent assignment in enumeration order with
/// the most true values among those that keep `c` true.
inline std::optional<ceg::CompiledGraph::Mask> baseline_for(const ceg::CompiledGraph& cg, std::size_t c,
                                                            std::size_t cap) {
  std::optional<ceg::CompiledGraph::Mask> best;
  int best_count = -1;
  cg.for_each_mask(cap, [&](ceg::CompiledGraph::Mask m) {
    if (!((m >> c) & 1u) || !cg.consistent(m)) return;
    int n = __builtin_popcountll(m);
    if (n > best_count) {
      best = m;
      best_count = n;
    }
  });
  return best;
}

}  // namespace detail

/// Fills link_questions, constraint_notes and rendered_question from the
/// assignments and affected statements.
inline void render(const ceg::CausalEffectGraph& g, InterventionQuestion& q) {
  std::vector<std::string> yes, no;
  for (const auto& [id, v] : q.baseline) {
    if (id == q.intervened_condition) continue;
    (v ? yes : no).push_back(detail::phrase(g, id));
  }
  std::string premise = "Assume all of: " + (yes.empty() ? std::string("nothing else") : text::join(yes, "; "));
  if (!no.empty()) premise += ", and none of: " + text::join(no, "; ");
  premise += ". Now suppose " + detail::phrase(g, q.intervened_condition) + " does NOT hold.";

  q.link_questions.clear();
  q.constraint_notes.clear();
  for (const auto& [effect, change] : q.expected_effect_changes) {
    q.link_questions.push_back(premise + " According to the requirement, is it correct that " + detail::phrase(g, effect) +
                               " should " + (change.after ? "occur" : "not occur") + "?");
  }
  auto cg = ceg::CompiledGraph(g);
  auto before = cg.evaluate(cg.mask_of(q.baseline)).violated_constraints;
  auto after = cg.evaluate(cg.mask_of(q.intervened)).violated_constraints;
  for (const auto& c : g.constraints) {
    bool was = std::find(before.begin(), before.end(), c) == before.end();
    bool now = std::find(after.begin(), after.end(), c) == after.end();
    if (was != now)
      q.constraint_notes.push_back(premise + " This " + (now ? "satisfies" : "violates") + " the requirement's rule " +
                                   ceg::to_string(c) + "; according to the requirement, is that situation " +
                                   (now ? "allowed" : "not allowed") + "?");
  }
  std::vector<std::string> lines = q.link_questions.empty() ? q.constraint_notes : q.link_questions;
  if (lines.size() == 1) {
    q.rendered_question = lines.front();
    return;
  }
  q.rendered_question.clear();
  for (std::size_t i = 0; i < lines.size(); ++i)
    q.rendered_question += (i ? "\n" : "") + std::to_string(i + 1) + ". " + lines[i];
}

/// One question per condition whose switch-off changes at least one link or
/// constraint. Affected statements are those whose value differs between the
/// baseline and the intervened assignment.
inline std::vector<InterventionQuestion> construct_iqs(const ceg::CausalEffectGraph& g,
                                                       std::size_t cap = ceg::kDefaultEnumerationCap) {
  ceg::CompiledGraph cg(g);
  std::vector<InterventionQuestion> out;
  const auto& conds = cg.conditions();
  const auto all = conds.size() >= 64 ? ~ceg::CompiledGraph::Mask{0} : (ceg::CompiledGraph::Mask{1} << conds.size()) - 1;
  for (std::size_t i = 0; i < conds.size(); ++i) {
    std::optional<ceg::CompiledGraph::Mask> base;
    if (cg.consistent(all)) base = all;
    else base = detail::baseline_for(cg, i, cap);
    if (!base) continue;  // the condition can never hold
    ceg::CompiledGraph::Mask flipped = *base & ~(ceg::CompiledGraph::Mask{1} << i);

    InterventionQuestion q;
    q.intervened_condition = conds[i];
    q.iq_id = "IQ-" + conds[i];
    q.baseline = cg.assignment_of(*base);
    q.intervened = cg.assignment_of(flipped);
    if (*base != all) q.baseline_note = "all-true baseline violates the constraints; using " + ceg::to_string(q.baseline);

    auto before = cg.effect_values(*base), after = cg.effect_values(flipped);
    for (const auto& l : g.links) {
      std::size_t e = std::find(cg.effects().begin(), cg.effects().end(), l.effect) - cg.effects().begin();
      if (before[e] != after[e]) {
        q.affected_statements.push_back(ceg::to_string(l));
        q.expected_effect_changes[l.effect] = {before[e], after[e]};
      }
    }
    for (const auto& c : g.constraints) {
      bool a0 = (*base >> cg.condition_index(c.a)) & 1u, b0 = (*base >> cg.condition_index(c.b)) & 1u;
      bool a1 = (flipped >> cg.condition_index(c.a)) & 1u, b1 = (flipped >> cg.condition_index(c.b)) & 1u;
      if (ceg::holds(c, a0, b0) != ceg::holds(c, a1, b1)) q.affected_statements.push_back(ceg::to_string(c));
    }
    if (q.affected_statements.empty()) continue;
    render(g, q);
    out.push_back(std::move(q));
  }
  return out;
}

inline nlohmann::json to_json_value(const InterventionQuestion& q) {
  nlohmann::json changes = nlohmann::json::object();
  for (const auto& [e, c] : q.expected_effect_changes) changes[e] = {{"before", c.before}, {"after", c.after}};
  nlohmann::json j{{"iq_id", q.iq_id},
                   {"intervened_condition", q.intervened_condition},
                   {"affected_statements", q.affected_statements},
                   {"baseline", q.baseline},
                   {"intervened", q.intervened},
                   {"expected_effect_changes", changes},
                   {"question", q.rendered_question}};
  if (!q.constraint_notes.empty()) j["constraint_notes"] = q.constraint_notes;
  if (q.baseline_note) j["baseline_note"] = *q.baseline_note;
  return j;
}

}  // namespace requireceg::intervention
