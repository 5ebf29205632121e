/// @file synthesis.hpp
/// @brief Branch coverage of links and scenarios for uncovered branches.
///
/// A branch is one term of the minimal disjunctive form of a link's cause, so
/// OR(C3,C4)=E3 has the branches C3 and C4. A scenario covers a branch when it
/// is consistent, its assignment satisfies the term, and it asserts the effect.
#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "requireceg/ceg/analysis.hpp"
#include "requireceg/ceg/evaluate.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/review/check.hpp"

namespace requireceg::review {

struct BranchRef {
  std::string effect;
  std::string term;  // to_string(Term), e.g. "C1&!C3"

  auto operator<=>(const BranchRef&) const = default;
};

struct Branch {
  BranchRef ref;
  ceg::Term term;
};

inline std::vector<Branch> branches(const ceg::CausalEffectGraph& g) {
  std::vector<Branch> out;
  for (const auto& l : g.links)
    for (auto& t : ceg::dnf_terms(l.cause)) out.push_back({{l.effect, ceg::to_string(t)}, std::move(t)});
  return out;
}

inline bool satisfies(const ceg::TruthAssignment& a, const ceg::Term& t) {
  for (const auto& lit : t) {
    auto it = a.find(lit.id);
    if (it == a.end() || it->second != lit.positive) return false;
  }
  return true;
}

/// Branches a consistent scenario exercises.
inline std::vector<BranchRef> covered_by(const ceg::CausalEffectGraph& g, const ScenarioVerdict& v) {
  std::vector<BranchRef> out;
  if (v.status != VerdictStatus::Consistent) return out;
  for (const auto& b : branches(g)) {
    auto it = v.asserted_effects.find(b.ref.effect);
    if (it != v.asserted_effects.end() && it->second && satisfies(v.assignment, b.term)) out.push_back(b.ref);
  }
  return out;
}

struct SynthesizedScenario {
  gherkin::Scenario scenario;
  BranchRef branch;
  ceg::TruthAssignment assignment;
  Defect defect;  // UncoveredLink, with the link as evidence
};

struct SynthesisResult {
  std::vector<SynthesizedScenario> scenarios;
  std::vector<BranchRef> unsatisfiable;  // no consistent assignment satisfies the term
};

namespace detail {

inline std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

/// Consistent assignment satisfying `t`. Assignments with a true trigger
/// condition come first, so that the scenario has an event to react to; then
/// the fewest true conditions; ties go to the first in enumeration order.
inline std::optional<ceg::CompiledGraph::Mask> smallest_witness(const ceg::CompiledGraph& cg, const ceg::Term& t,
                                                                std::size_t cap,
                                                                ceg::CompiledGraph::Mask triggers = 0) {
  std::optional<ceg::CompiledGraph::Mask> best;
  std::pair<int, int> best_key{0, 0};
  cg.for_each_mask(cap, [&](ceg::CompiledGraph::Mask m) {
    for (const auto& lit : t)
      if ((((m >> cg.condition_index(lit.id)) & 1u) != 0) != lit.positive) return;
    if (!cg.consistent(m)) return;
    std::pair<int, int> key{(m & triggers) ? 0 : 1, __builtin_popcountll(m)};
    if (!best || key < best_key) {
      best = m;
      best_key = key;
    }
  });
  return best;
}

inline ceg::CompiledGraph::Mask trigger_mask(const ceg::CausalEffectGraph& g, const ceg::CompiledGraph& cg) {
  ceg::CompiledGraph::Mask m = 0;
  for (std::size_t i = 0; i < cg.conditions().size(); ++i)
    if (g.node(cg.conditions()[i]).trigger) m |= ceg::CompiledGraph::Mask{1} << i;
  return m;
}

}  // namespace detail

/// One scenario per uncovered, satisfiable branch. Givens come from the term's
/// literals, a trigger condition when the term has none, and any extra
/// conditions the constraints force; the last true
/// trigger condition becomes the When step (without a trigger, the term's last
/// literal does). Then steps state every effect that follows, the target first.
inline SynthesisResult synthesize_missing(const ceg::CausalEffectGraph& g, std::set<BranchRef> covered,
                                          std::vector<std::string> taken_titles = {},
                                          std::size_t cap = ceg::kDefaultEnumerationCap) {
  SynthesisResult r;
  ceg::CompiledGraph cg(g);
  const auto all_branches = branches(g);
  const auto triggers = detail::trigger_mask(g, cg);
  for (const auto& br : all_branches) {
    if (covered.count(br.ref)) continue;
    auto m = detail::smallest_witness(cg, br.term, cap, triggers);
    if (!m) {
      r.unsatisfiable.push_back(br.ref);
      continue;
    }
    SynthesizedScenario s;
    s.branch = br.ref;
    s.assignment = cg.assignment_of(*m);

    // literal order: term literals (by id), then forced extras (by id)
    std::vector<std::pair<std::string, Polarity>> lits;
    for (const auto& lit : br.term) lits.push_back({lit.id, lit.positive ? Polarity::Positive : Polarity::Negative});
    for (const auto& [id, val] : s.assignment)
      if (val && std::none_of(lits.begin(), lits.end(), [&](const auto& p) { return p.first == id; }))
        lits.push_back({id, Polarity::Positive});
    std::optional<std::size_t> when;
    for (std::size_t i = 0; i < lits.size(); ++i)
      if (lits[i].second == Polarity::Positive && g.node(lits[i].first).trigger) when = i;
    if (!when && !br.term.empty()) when = br.term.size() - 1;

    auto& sc = s.scenario;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      gherkin::Step st;
      st.kind = when && *when == i ? gherkin::StepKind::Trigger : gherkin::StepKind::Precondition;
      st.text = step_text(g.node(lits[i].first), lits[i].second);
      sc.steps.push_back(std::move(st));
    }
    std::stable_partition(sc.steps.begin(), sc.steps.end(),
                          [](const gherkin::Step& st) { return st.kind == gherkin::StepKind::Precondition; });
    auto values = cg.effect_values(*m);
    std::vector<std::string> fired{br.ref.effect};
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] && cg.effects()[i] != br.ref.effect) fired.push_back(cg.effects()[i]);
    for (const auto& e : fired) {
      gherkin::Step st;
      st.kind = gherkin::StepKind::Action;
      st.text = step_text(g.node(e));
      sc.steps.push_back(std::move(st));
    }
    gherkin::normalize_keywords(sc.steps);

    std::vector<std::string> conds;
    for (const auto& lit : br.term)
      conds.push_back(step_text(g.node(lit.id), lit.positive ? Polarity::Positive : Polarity::Negative));
    std::string base = detail::capitalize(text::join(conds, " and "));
    std::string title = base;
    for (int k = 2; std::find(taken_titles.begin(), taken_titles.end(), title) != taken_titles.end(); ++k)
      title = base + " (" + std::to_string(k) + ")";
    taken_titles.push_back(title);
    sc.title = title;

    s.defect = {DefectKind::UncoveredLink, br.ref.effect,
                "no scenario exercised the branch " + br.ref.term + " of " + br.ref.effect, link_evidence(g, br.ref.effect),
                {}};

    // everything this scenario asserts counts as covered from here on
    for (const auto& other : all_branches)
      if (std::find(fired.begin(), fired.end(), other.ref.effect) != fired.end() && satisfies(s.assignment, other.term))
        covered.insert(other.ref);
    r.scenarios.push_back(std::move(s));
  }
  return r;
}

}  // namespace requireceg::review
