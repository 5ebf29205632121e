/// @file review.hpp
/// @brief Reviews a feature file against its graph: repairs mismatching
/// scenarios, keeps consistent ones, and adds scenarios for uncovered branches.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/ceg/graph.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/gherkin/writer.hpp"
#include "requireceg/oracle/prompts.hpp"
#include "requireceg/review/binding.hpp"
#include "requireceg/review/check.hpp"
#include "requireceg/review/synthesis.hpp"

namespace requireceg::review {

using json = nlohmann::json;

struct ReviewOptions {
  std::size_t max_rounds = 5;  // check/edit rounds per scenario
  bool synthesize = true;
  bool reword = true;  // ask the Review agent to rephrase template edits (needs an oracle)
  std::size_t cap = ceg::kDefaultEnumerationCap;
};

struct ModifiedScenario {
  gherkin::Scenario original;
  std::vector<gherkin::Scenario> revised;  // several when an outline was expanded
  std::vector<Defect> defects;
  bool reworded = false;
};

struct ReviewReport {
  std::vector<gherkin::Scenario> kept;
  std::vector<ModifiedScenario> modified;
  std::vector<SynthesizedScenario> added;
  std::vector<ScenarioVerdict> verdicts;  // final verdict of every scenario in the revised document
  std::vector<std::string> unbindable;    // titles
  std::vector<std::string> unresolved;    // titles still mismatching after max_rounds
  std::vector<BranchRef> unsatisfiable;
  std::vector<UnboundStep> unbound_background;
  double coverage = 1.0;         // links exercised by at least one scenario
  double branch_coverage = 1.0;  // satisfiable branches exercised
};

struct ReviewResult {
  gherkin::GherkinDocument revised;
  ReviewReport report;
};

namespace detail {

inline std::string substitute(std::string s, const std::vector<std::string>& headers, const gherkin::TableRow& row) {
  for (std::size_t i = 0; i < headers.size() && i < row.size(); ++i) s = text::replace_all(s, "<" + headers[i] + ">", row[i]);
  return s;
}

/// Plain scenarios, one per examples row.
inline std::vector<gherkin::Scenario> expand_outline(const gherkin::Scenario& sc) {
  std::vector<gherkin::Scenario> out;
  std::size_t n = 0;
  for (const auto& ex : sc.examples) {
    for (const auto& row : ex.rows) {
      gherkin::Scenario p;
      p.title = sc.title + " (example " + std::to_string(++n) + ")";
      p.tags = sc.tags;
      for (auto st : sc.steps) {
        st.text = substitute(st.text, ex.headers, row);
        for (auto& r : st.table)
          for (auto& c : r) c = substitute(c, ex.headers, row);
        if (st.doc_string) st.doc_string->content = substitute(st.doc_string->content, ex.headers, row);
        st.comments.clear();
        p.steps.push_back(std::move(st));
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

class Reviewer {
 public:
  Reviewer(const ceg::CausalEffectGraph& g, oracle::Oracle* oracle, const ReviewOptions& opt,
           std::vector<StepBinding> background)
      : g_(g), oracle_(oracle), opt_(opt), background_(std::move(background)) {}

  ScenarioVerdict check(const gherkin::Scenario& sc) {
    ScenarioBindings b;
    std::vector<UnboundStep> unbound;
    b.steps = bind_scenario_steps(sc.steps, 0, g_, oracle_, &unbound);
    b.reasons.resize(sc.steps.size());
    for (const auto& u : unbound) b.reasons[u.step.step] = u.reason;
    b.background = background_;
    return check_scenario(sc, b, g_);
  }

  struct Outcome {
    gherkin::Scenario scenario;
    ScenarioVerdict verdict;
    std::vector<Defect> defects;  // everything found along the way
    bool changed = false;
  };

  /// Check, apply the suggested edits, check again; at most max_rounds times.
  Outcome repair(const gherkin::Scenario& sc) {
    Outcome o{sc, check(sc), {}, false};
    for (std::size_t round = 0; round < opt_.max_rounds && o.verdict.status == VerdictStatus::Mismatch; ++round) {
      std::vector<StepEdit> edits;
      for (const auto& d : o.verdict.defects) {
        o.defects.push_back(d);
        edits.insert(edits.end(), d.suggested_edit.begin(), d.suggested_edit.end());
      }
      if (edits.empty()) break;
      gherkin::Scenario next = apply_edits(o.scenario, edits);
      if (next == o.scenario) break;
      o.scenario = std::move(next);
      o.changed = true;
      o.verdict = check(o.scenario);
    }
    return o;
  }

  /// Lets the Review agent rephrase a repaired scenario. The rewording is kept
  /// only if it has the same keywords and still checks as consistent.
  bool reword(const gherkin::Scenario& original, gherkin::Scenario& revised, const std::vector<Defect>& defects) {
    if (!oracle_ || !opt_.reword) return false;
    std::string atoms, defect_text;
    for (const auto& [id, n] : g_.nodes) atoms += ceg::declaration_text(n) + "\n";
    for (const auto& d : defects) defect_text += std::string("- ") + defect_name(d.kind) + ": " + d.detail + "\n";
    json a = oracle::ask_agent(*oracle_, "Review",
                               {{"atoms", atoms},
                                {"original", gherkin::serialize_scenario(original)},
                                {"defects", defect_text},
                                {"revised", gherkin::serialize_scenario(revised)}});
    if (!a.contains("steps") || !a["steps"].is_array())
      throw OracleFailure(OracleFailure::Reason::Malformed, "Review answer needs a 'steps' list");
    if (a["steps"].size() != revised.steps.size()) return false;
    gherkin::Scenario candidate = revised;
    for (std::size_t i = 0; i < candidate.steps.size(); ++i) {
      const json& s = a["steps"][i];
      if (!s.is_object() || !s.contains("text") || !s["text"].is_string() || !s.contains("keyword"))
        throw OracleFailure(OracleFailure::Reason::Malformed, "Review steps need 'keyword' and 'text'");
      if (s["keyword"] != gherkin::keyword_name(candidate.steps[i].keyword)) return false;
      std::string t = text::trim(s["text"].get<std::string>());
      if (t.empty() || t.find('\n') != std::string::npos) return false;
      candidate.steps[i].text = t;
    }
    if (check(candidate).status != VerdictStatus::Consistent) return false;
    revised = std::move(candidate);
    return true;
  }

 private:
  const ceg::CausalEffectGraph& g_;
  oracle::Oracle* oracle_;
  ReviewOptions opt_;
  std::vector<StepBinding> background_;
};

}  // namespace detail

/// Reviews `doc` against `g`. Scenarios are never removed: each one is either
/// kept as is or replaced by its repaired form. With synthesis on, scenarios
/// for uncovered branches are appended.
inline ReviewResult review(const gherkin::GherkinDocument& doc, const ceg::CausalEffectGraph& g,
                           oracle::Oracle* oracle = nullptr, const ReviewOptions& opt = {}) {
  ReviewResult res;
  ReviewReport& rep = res.report;
  res.revised = doc;
  res.revised.scenarios.clear();

  std::vector<StepBinding> background;
  if (doc.background) {
    std::vector<UnboundStep> unbound;
    for (const auto& b : bind_scenario_steps(doc.background->steps, std::nullopt, g, oracle, &unbound))
      if (b) background.push_back(*b);
    rep.unbound_background = unbound;
  }
  detail::Reviewer rv(g, oracle, opt, background);

  auto note_final = [&](const gherkin::Scenario& sc, const ScenarioVerdict& v) {
    res.revised.scenarios.push_back(sc);
    rep.verdicts.push_back(v);
    if (v.status == VerdictStatus::Unbindable) rep.unbindable.push_back(sc.title);
    if (v.status == VerdictStatus::Mismatch) rep.unresolved.push_back(sc.title);
  };

  for (const auto& sc : doc.scenarios) {
    if (sc.kind == gherkin::ScenarioKind::Outline) {
      auto rows = detail::expand_outline(sc);
      std::vector<detail::Reviewer::Outcome> outs;
      bool changed = false;
      for (const auto& r : rows) {
        outs.push_back(rv.repair(r));
        changed = changed || outs.back().changed;
      }
      if (!changed) {
        rep.kept.push_back(sc);
        // the outline stays; its rows carry the verdicts
        res.revised.scenarios.push_back(sc);
        for (const auto& o : outs) {
          rep.verdicts.push_back(o.verdict);
          if (o.verdict.status == VerdictStatus::Unbindable) rep.unbindable.push_back(o.scenario.title);
          if (o.verdict.status == VerdictStatus::Mismatch) rep.unresolved.push_back(o.scenario.title);
        }
        continue;
      }
      ModifiedScenario m{sc, {}, {}, false};
      for (auto& o : outs) {
        m.defects.insert(m.defects.end(), o.defects.begin(), o.defects.end());
        if (o.changed && o.verdict.status == VerdictStatus::Consistent && rv.reword(sc, o.scenario, o.defects)) {
          m.reworded = true;
          o.verdict = rv.check(o.scenario);
        }
        m.revised.push_back(o.scenario);
        note_final(o.scenario, o.verdict);
      }
      rep.modified.push_back(std::move(m));
      continue;
    }
    auto o = rv.repair(sc);
    if (!o.changed) {
      rep.kept.push_back(sc);
      note_final(sc, o.verdict);
      continue;
    }
    ModifiedScenario m{sc, {}, o.defects, false};
    if (o.verdict.status == VerdictStatus::Consistent && rv.reword(sc, o.scenario, o.defects)) {
      m.reworded = true;
      o.verdict = rv.check(o.scenario);
    }
    m.revised.push_back(o.scenario);
    note_final(o.scenario, o.verdict);
    rep.modified.push_back(std::move(m));
  }

  std::set<BranchRef> covered;
  for (const auto& v : rep.verdicts)
    for (const auto& b : covered_by(g, v)) covered.insert(b);

  if (opt.synthesize) {
    std::vector<std::string> titles;
    for (const auto& sc : res.revised.scenarios) titles.push_back(sc.title);
    auto syn = synthesize_missing(g, covered, titles, opt.cap);
    rep.unsatisfiable = syn.unsatisfiable;
    for (auto& s : syn.scenarios) {
      ScenarioVerdict v = rv.check(s.scenario);
      for (const auto& b : covered_by(g, v)) covered.insert(b);
      note_final(s.scenario, v);
      rep.added.push_back(std::move(s));
    }
  } else {
    ceg::CompiledGraph cg(g);
    for (const auto& b : branches(g))
      if (!covered.count(b.ref) && !detail::smallest_witness(cg, b.term, opt.cap)) rep.unsatisfiable.push_back(b.ref);
  }

  // coverage over satisfiable content only
  std::set<std::string> links_total, links_hit;
  std::size_t branches_total = 0, branches_hit = 0;
  for (const auto& b : branches(g)) {
    if (std::find(rep.unsatisfiable.begin(), rep.unsatisfiable.end(), b.ref) != rep.unsatisfiable.end()) continue;
    ++branches_total;
    links_total.insert(b.ref.effect);
    if (covered.count(b.ref)) {
      ++branches_hit;
      links_hit.insert(b.ref.effect);
    }
  }
  rep.coverage = links_total.empty() ? 1.0 : static_cast<double>(links_hit.size()) / links_total.size();
  rep.branch_coverage = branches_total == 0 ? 1.0 : static_cast<double>(branches_hit) / branches_total;
  return res;
}

inline json to_json_value(const StepEdit& e) {
  json j{{"op", e.op == StepEdit::Op::Insert ? "insert" : "remove"},
         {"keyword", gherkin::keyword_name(gherkin::primary_keyword(e.kind))},
         {"atom", e.atom}};
  if (e.op == StepEdit::Op::Insert) j["text"] = e.text;
  else j["step"] = e.index + 1;
  return j;
}

inline json to_json_value(const Defect& d) {
  json j{{"kind", defect_name(d.kind)}, {"atom", d.atom}, {"detail", d.detail}, {"evidence", d.evidence}};
  j["suggested_edit"] = json::array();
  for (const auto& e : d.suggested_edit) j["suggested_edit"].push_back(to_json_value(e));
  return j;
}

inline json to_json_value(const ScenarioVerdict& v) {
  json j{{"scenario", v.scenario}, {"status", status_name(v.status)}, {"evidence", v.evidence}, {"defects", json::array()}};
  for (const auto& d : v.defects) j["defects"].push_back(to_json_value(d));
  if (!v.notes.empty()) j["notes"] = v.notes;
  return j;
}

inline json to_json_value(const ReviewReport& r) {
  json j{{"summary",
          {{"kept", r.kept.size()},
           {"modified", r.modified.size()},
           {"added", r.added.size()},
           {"unbindable", r.unbindable.size()},
           {"unresolved", r.unresolved.size()}}},
         {"coverage", r.coverage},
         {"branch_coverage", r.branch_coverage},
         {"kept", json::array()},
         {"modified", json::array()},
         {"added", json::array()},
         {"verdicts", json::array()},
         {"unbindable", r.unbindable},
         {"unresolved", r.unresolved}};
  for (const auto& k : r.kept) j["kept"].push_back(k.title);
  for (const auto& m : r.modified) {
    json e{{"original", m.original.title},
           {"original_text", gherkin::serialize_scenario(m.original)},
           {"revised", json::array()},
           {"defects", json::array()},
           {"reworded", m.reworded}};
    for (const auto& s : m.revised) e["revised"].push_back(gherkin::serialize_scenario(s));
    for (const auto& d : m.defects) e["defects"].push_back(to_json_value(d));
    j["modified"].push_back(std::move(e));
  }
  for (const auto& a : r.added)
    j["added"].push_back({{"title", a.scenario.title},
                          {"text", gherkin::serialize_scenario(a.scenario)},
                          {"branch", a.branch.effect + ":" + a.branch.term},
                          {"defect", to_json_value(a.defect)}});
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json_value(v));
  if (!r.unsatisfiable.empty()) {
    j["unsatisfiable_branches"] = json::array();
    for (const auto& b : r.unsatisfiable) j["unsatisfiable_branches"].push_back(b.effect + ":" + b.term);
  }
  if (!r.unbound_background.empty()) {
    j["unbound_background_steps"] = json::array();
    for (const auto& u : r.unbound_background) j["unbound_background_steps"].push_back({{"text", u.text}, {"reason", u.reason}});
  }
  return j;
}

}  // namespace requireceg::review
