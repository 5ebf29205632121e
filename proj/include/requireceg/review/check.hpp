/// @file check.hpp
/// @brief Checks one scenario against the graph and proposes step edits.
///
/// A scenario is read as a truth assignment: Given and When steps set their
/// conditions, every condition the scenario does not mention is false. Then
/// steps are the asserted effects. The scenario is consistent when no
/// constraint is violated, every asserted effect follows, and every effect
/// that follows is asserted.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "requireceg/ceg/analysis.hpp"
#include "requireceg/ceg/evaluate.hpp"
#include "requireceg/ceg/graph.hpp"
#include "requireceg/ceg/syntax.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/review/binding.hpp"

namespace requireceg::review {

enum class VerdictStatus { Consistent, Mismatch, Unbindable };
enum class DefectKind { MissingPrecondition, MissingEffect, WrongEffect, ConstraintViolation, UncoveredLink };

inline const char* status_name(VerdictStatus s) noexcept {
  switch (s) {
    case VerdictStatus::Consistent: return "Consistent";
    case VerdictStatus::Mismatch: return "Mismatch";
    case VerdictStatus::Unbindable: return "Unbindable";
  }
  return "Unbindable";
}

inline const char* defect_name(DefectKind k) noexcept {
  switch (k) {
    case DefectKind::MissingPrecondition: return "MissingPrecondition";
    case DefectKind::MissingEffect: return "MissingEffect";
    case DefectKind::WrongEffect: return "WrongEffect";
    case DefectKind::ConstraintViolation: return "ConstraintViolation";
    case DefectKind::UncoveredLink: return "UncoveredLink";
  }
  return "?";
}

/// One step-level change. Inserted steps go to the end of their block
/// (Given, When or Then); removals name a step index of the checked scenario.
struct StepEdit {
  enum class Op { Insert, Remove };
  Op op = Op::Insert;
  gherkin::StepKind kind = gherkin::StepKind::Precondition;
  std::string atom;
  Polarity polarity = Polarity::Positive;
  std::string text;
  std::size_t index = 0;  // Remove only

  bool operator==(const StepEdit&) const = default;
};

struct Defect {
  DefectKind kind = DefectKind::MissingPrecondition;
  std::string atom;  // the condition or effect the defect is about
  std::string detail;
  std::vector<std::string> evidence;  // graph statements
  std::vector<StepEdit> suggested_edit;
};

struct ScenarioVerdict {
  std::string scenario;
  VerdictStatus status = VerdictStatus::Consistent;
  std::vector<Defect> defects;
  std::vector<std::string> evidence;
  ceg::TruthAssignment assignment;                 // empty when Unbindable
  std::map<std::string, bool> asserted_effects;    // Then steps: effect -> asserted value
  std::vector<std::string> notes;                  // why a scenario is unbindable, and similar
};

/// Bindings of one scenario plus the bound background steps it inherits.
struct ScenarioBindings {
  std::vector<std::optional<StepBinding>> steps;
  std::vector<std::string> reasons;  // parallel to steps; set for unbound ones
  std::vector<StepBinding> background;
};

/// Step text for an atom: its description with a lowercase first letter and
/// no final period, negated as "it is not true that ..." when needed.
inline std::string step_text(const ceg::AtomicNode& n, Polarity p = Polarity::Positive) {
  std::string d = text::trim(n.description);
  while (!d.empty() && d.back() == '.') d.pop_back();
  if (d.size() >= 2 && std::isupper(static_cast<unsigned char>(d[0])) && std::islower(static_cast<unsigned char>(d[1])))
    d[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(d[0])));
  return p == Polarity::Positive ? d : "it is not true that " + d;
}

/// Statements that explain an effect: the merged link plus, when it was
/// merged from several raw statements, those statements.
inline std::vector<std::string> link_evidence(const ceg::CausalEffectGraph& g, const std::string& effect) {
  std::vector<std::string> out;
  if (const auto* l = g.link_for(effect)) out.push_back(ceg::to_string(*l));
  std::vector<std::string> raw;
  for (const auto& s : g.raw_statements) {
    if (std::find(g.rejected.begin(), g.rejected.end(), s) != g.rejected.end()) continue;
    try {
      auto st = ceg::parse_statement(s);
      if (st.rhs && *st.rhs == effect) raw.push_back(s);
    } catch (const DslSyntaxError&) {
    }
  }
  if (raw.size() > 1)
    for (const auto& r : raw)
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  if (out.empty()) out.push_back("(no statement derives " + effect + ")");
  return out;
}

namespace detail {

/// Triggers go to the When block unless the scenario already has its event;
/// a second event is stated as context instead.
inline gherkin::StepKind condition_block(const ceg::AtomicNode& n, bool has_trigger) {
  return n.trigger && !has_trigger ? gherkin::StepKind::Trigger : gherkin::StepKind::Precondition;
}

inline void add_defect(std::vector<Defect>& out, Defect d) {
  for (auto& e : out) {
    if (e.kind == d.kind && e.atom == d.atom) {
      for (const auto& s : d.evidence)
        if (std::find(e.evidence.begin(), e.evidence.end(), s) == e.evidence.end()) e.evidence.push_back(s);
      return;
    }
  }
  out.push_back(std::move(d));
}

}  // namespace detail

inline ScenarioVerdict check_scenario(const gherkin::Scenario& sc, const ScenarioBindings& b,
                                      const ceg::CausalEffectGraph& g) {
  ScenarioVerdict v;
  v.scenario = sc.title;
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    if (i >= b.steps.size() || !b.steps[i]) {
      std::string why = i < b.reasons.size() && !b.reasons[i].empty() ? b.reasons[i] : "unbound";
      v.notes.push_back("step " + std::to_string(i + 1) + " '" + sc.steps[i].text + "': " + why);
    }
  }
  if (!v.notes.empty()) {
    v.status = VerdictStatus::Unbindable;
    return v;
  }

  std::map<std::string, bool> explicit_conditions;
  auto set_condition = [&](const StepBinding& s) {
    bool val = s.polarity == Polarity::Positive;
    auto [it, fresh] = explicit_conditions.emplace(s.atom, val);
    if (!fresh && it->second != val) v.notes.push_back("steps both assert and deny " + s.atom);
  };
  for (const auto& s : b.background) set_condition(s);
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const auto& s = *b.steps[i];
    if (sc.steps[i].kind == gherkin::StepKind::Action) {
      bool val = s.polarity == Polarity::Positive;
      auto [it, fresh] = v.asserted_effects.emplace(s.atom, val);
      if (!fresh && it->second != val) v.notes.push_back("steps both assert and deny " + s.atom);
    } else {
      set_condition(s);
    }
  }
  if (!v.notes.empty()) {
    v.status = VerdictStatus::Unbindable;
    return v;
  }

  ceg::CompiledGraph cg(g);
  for (const auto& c : cg.conditions()) {
    auto it = explicit_conditions.find(c);
    v.assignment[c] = it != explicit_conditions.end() && it->second;
  }
  const auto mask = cg.mask_of(v.assignment);
  const ceg::Evaluation ev = cg.evaluate(mask);

  auto step_index_of = [&](const std::string& atom) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sc.steps.size(); ++i)
      if (b.steps[i]->atom == atom) out.push_back(i);
    return out;
  };
  auto insert_condition = [&](const std::string& id) {
    const auto& n = g.node(id);
    bool has_trigger = std::any_of(sc.steps.begin(), sc.steps.end(),
                                   [](const gherkin::Step& st) { return st.kind == gherkin::StepKind::Trigger; });
    return StepEdit{StepEdit::Op::Insert, detail::condition_block(n, has_trigger), id, Polarity::Positive, step_text(n), 0};
  };

  // (a) constraints
  for (const auto& c : ev.violated_constraints) {
    Defect d{DefectKind::ConstraintViolation, c.a, "", {ceg::to_string(c)}, {}};
    auto is_explicit_false = [&](const std::string& id) {
      auto it = explicit_conditions.find(id);
      return it != explicit_conditions.end() && !it->second;
    };
    switch (c.op) {
      case ceg::ConstraintOp::REQ:
        d.detail = c.a + " holds but the scenario does not establish " + c.b + ", which it requires";
        if (!is_explicit_false(c.b)) d.suggested_edit.push_back(insert_condition(c.b));
        break;
      case ceg::ConstraintOp::INC:
      case ceg::ConstraintOp::XOR:
        if (!v.assignment[c.a]) {
          d.detail = "neither " + c.a + " nor " + c.b + " holds";
          if (!is_explicit_false(c.a)) d.suggested_edit.push_back(insert_condition(c.a));
          else if (!is_explicit_false(c.b)) d.suggested_edit.push_back(insert_condition(c.b));
        } else {
          d.detail = "both " + c.a + " and " + c.b + " hold";
        }
        break;
      case ceg::ConstraintOp::EXC:
        d.detail = "both " + c.a + " and " + c.b + " hold";
        break;
    }
    detail::add_defect(v.defects, std::move(d));
  }

  // (b) asserted effects must follow
  for (const auto& [e, want] : v.asserted_effects) {
    bool got = ev.effects.at(e);
    if (got == want) continue;
    if (want) {
      const auto* link = g.link_for(e);
      std::optional<ceg::Term> best;
      std::size_t best_missing = 0;
      if (link) {
        for (const auto& term : ceg::dnf_terms(link->cause)) {
          ceg::TruthAssignment trial = v.assignment;
          bool compatible = true;
          std::size_t missing = 0;
          for (const auto& lit : term) {
            auto it = explicit_conditions.find(lit.id);
            if (it != explicit_conditions.end() && it->second != lit.positive) compatible = false;
            if (trial[lit.id] != lit.positive) ++missing;
            trial[lit.id] = lit.positive;
          }
          if (!compatible || !cg.consistent(cg.mask_of(trial))) continue;
          if (!best || missing < best_missing) {
            best = term;
            best_missing = missing;
          }
        }
      }
      if (best) {
        for (const auto& lit : *best) {
          if (v.assignment[lit.id] == lit.positive) continue;
          Defect d{DefectKind::MissingPrecondition, lit.id,
                   e + " is asserted but its cause needs " + lit.id + " (" + step_text(g.node(lit.id)) + ")",
                   link_evidence(g, e), {insert_condition(lit.id)}};
          detail::add_defect(v.defects, std::move(d));
        }
        continue;
      }
    }
    Defect d{DefectKind::WrongEffect, e,
             want ? e + " is asserted but cannot follow from the scenario's preconditions"
                  : e + " is denied but follows from the scenario's preconditions",
             link_evidence(g, e), {}};
    for (std::size_t i : step_index_of(e))
      if (sc.steps[i].kind == gherkin::StepKind::Action)
        d.suggested_edit.push_back({StepEdit::Op::Remove, gherkin::StepKind::Action, e, b.steps[i]->polarity, "", i});
    detail::add_defect(v.defects, std::move(d));
  }

  // (c) every effect that follows is asserted
  for (const auto& l : g.links) {
    if (!ev.effects.at(l.effect) || v.asserted_effects.count(l.effect)) continue;
    const auto& n = g.node(l.effect);
    detail::add_defect(v.defects, {DefectKind::MissingEffect, l.effect,
                                   l.effect + " follows from the scenario's preconditions but no Then step states it",
                                   link_evidence(g, l.effect),
                                   {{StepEdit::Op::Insert, gherkin::StepKind::Action, l.effect, Polarity::Positive,
                                     step_text(n), 0}}});
  }

  for (const auto& l : g.links)
    if (ev.effects.at(l.effect)) v.evidence.push_back(ceg::to_string(l));
  for (const auto& d : v.defects)
    for (const auto& s : d.evidence)
      if (std::find(v.evidence.begin(), v.evidence.end(), s) == v.evidence.end()) v.evidence.push_back(s);
  v.status = v.defects.empty() ? VerdictStatus::Consistent : VerdictStatus::Mismatch;
  return v;
}

/// Applies edits: removals first (highest index first), then insertions at the
/// end of their block. Keywords are renormalized afterwards. A removal that
/// would leave no Then step is skipped.
inline gherkin::Scenario apply_edits(const gherkin::Scenario& sc, const std::vector<StepEdit>& edits) {
  gherkin::Scenario out = sc;
  std::vector<std::size_t> removals;
  for (const auto& e : edits)
    if (e.op == StepEdit::Op::Remove) removals.push_back(e.index);
  std::sort(removals.rbegin(), removals.rend());
  removals.erase(std::unique(removals.begin(), removals.end()), removals.end());
  for (std::size_t i : removals) {
    std::size_t thens = std::count_if(out.steps.begin(), out.steps.end(),
                                      [](const gherkin::Step& s) { return s.kind == gherkin::StepKind::Action; });
    if (i < out.steps.size() && (out.steps[i].kind != gherkin::StepKind::Action || thens > 1))
      out.steps.erase(out.steps.begin() + static_cast<std::ptrdiff_t>(i));
  }
  std::vector<std::string> inserted;
  for (const auto& e : edits) {
    if (e.op != StepEdit::Op::Insert) continue;
    std::string key = e.atom + (e.polarity == Polarity::Positive ? "+" : "-");
    if (std::find(inserted.begin(), inserted.end(), key) != inserted.end()) continue;
    inserted.push_back(key);
    gherkin::Step s;
    s.kind = e.kind;
    s.keyword = gherkin::primary_keyword(e.kind);
    s.text = e.text;
    auto pos = std::find_if(out.steps.begin(), out.steps.end(),
                            [&](const gherkin::Step& x) { return static_cast<int>(x.kind) > static_cast<int>(e.kind); });
    out.steps.insert(pos, std::move(s));
  }
  gherkin::normalize_keywords(out.steps);
  return out;
}

}  // namespace requireceg::review
