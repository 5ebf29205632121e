#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "requireceg/ceg/evaluate.hpp"
#include "requireceg/ceg/graph.hpp"
#include "requireceg/ceg/syntax.hpp"
#include "requireceg/errors.hpp"
#include "requireceg/text.hpp"

namespace requireceg::ceg {

/// Consistent assignments under which no linked effect occurs: situations the
/// requirement says nothing about.
inline std::vector<TruthAssignment> find_uncovered_conditions(const CausalEffectGraph& g,
                                                              std::size_t cap = kDefaultEnumerationCap) {
  CompiledGraph c(g);
  std::vector<TruthAssignment> out;
  c.for_each_mask(cap, [&](CompiledGraph::Mask m) {
    if (c.consistent(m) && !c.any_link_fires(m)) out.push_back(c.assignment_of(m));
  });
  return out;
}

/// Literals shared by every assignment in `as`, e.g. the "nothing selected"
/// conjunction behind a family of uncovered assignments.
inline std::map<std::string, bool> common_literals(const std::vector<TruthAssignment>& as) {
  std::map<std::string, bool> out;
  if (as.empty()) return out;
  out = as.front();
  for (const auto& a : as) {
    for (auto it = out.begin(); it != out.end();) {
      auto f = a.find(it->first);
      if (f == a.end() || f->second != it->second) it = out.erase(it);
      else ++it;
    }
  }
  return out;
}

/// A required constraint, possibly with alternatives: satisfied when the
/// disjunction of its alternatives holds in every consistent assignment.
struct ConstraintPattern {
  std::vector<Constraint> alternatives;

  bool operator==(const ConstraintPattern&) const = default;
};

inline std::string to_string(const ConstraintPattern& p) {
  std::vector<std::string> parts;
  for (const auto& c : p.alternatives) parts.push_back(to_string(c));
  return text::join(parts, " | ");
}

namespace detail {

inline Constraint parse_pattern_constraint(std::string_view alt, std::size_t line) {
  StatementSyntax s = parse_statement(alt, line);
  auto op = s.lhs.is_call ? constraint_op_from(text::to_upper(s.lhs.name)) : std::nullopt;
  if (!op || s.rhs || s.lhs.args.size() != 2 || s.lhs.args[0].is_call || s.lhs.args[1].is_call)
    throw DslSyntaxError(line, 1, "pattern alternative must look like REQ(Ca,Cb): '" + std::string(alt) + "'");
  return {*op, s.lhs.args[0].name, s.lhs.args[1].name};
}

}  // namespace detail

/// One pattern per line. Alternatives are separated by `|`; a line may start
/// with `forall X in {C1,C2}:` to stamp out one pattern per listed id.
///
///   REQ(C1,C2)
///   forall X in {C_AE,C_Ren,C_IE}: REQ(X,C_intro) | REQ(X,C_pre)
inline std::vector<ConstraintPattern> parse_patterns(std::string_view source) {
  std::vector<ConstraintPattern> out;
  auto lines = text::split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view l = text::trim_view(lines[i]);
    if (l.empty() || l.front() == '#') continue;
    std::string var;
    std::vector<std::string> domain;
    if (l.starts_with("forall ")) {
      std::size_t open = l.find('{'), close = l.find('}'), colon = l.find(':', close == std::string_view::npos ? 0 : close);
      auto head = text::split_whitespace(l.substr(0, open == std::string_view::npos ? l.size() : open));
      if (open == std::string_view::npos || close == std::string_view::npos || colon == std::string_view::npos ||
          head.size() != 3 || head[2] != "in")
        throw DslSyntaxError(i + 1, 1, "expected 'forall X in {ids}: pattern'");
      var = head[1];
      for (const auto& id : text::split(l.substr(open + 1, close - open - 1), ',')) {
        std::string t = text::trim(id);
        if (!t.empty()) domain.push_back(t);
      }
      l = text::trim_view(l.substr(colon + 1));
    }
    std::vector<Constraint> alts;
    for (const auto& alt : text::split(l, '|')) alts.push_back(detail::parse_pattern_constraint(alt, i + 1));
    if (var.empty()) {
      out.push_back({alts});
      continue;
    }
    for (const auto& id : domain) {
      ConstraintPattern p;
      for (auto c : alts) {
        if (c.a == var) c.a = id;
        if (c.b == var) c.b = id;
        p.alternatives.push_back(c);
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Required patterns that the graph's constraints do not entail.
inline std::vector<ConstraintPattern> diff_constraint_coverage(const CausalEffectGraph& g,
                                                               const std::vector<ConstraintPattern>& required,
                                                               std::size_t cap = kDefaultEnumerationCap) {
  if (required.empty()) return {};
  for (const auto& p : required)
    for (const auto& c : p.alternatives)
      for (const auto& id : {c.a, c.b}) {
        auto it = g.nodes.find(id);
        if (it == g.nodes.end() || it->second.kind != NodeKind::Condition)
          throw PreconditionViolation("pattern " + to_string(p) + " references " + id + ", which is not a declared condition");
      }
  CompiledGraph c(g);
  std::vector<bool> entailed(required.size(), true);
  c.for_each_mask(cap, [&](CompiledGraph::Mask m) {
    if (!c.consistent(m)) return;
    for (std::size_t i = 0; i < required.size(); ++i) {
      if (!entailed[i]) continue;
      bool any = false;
      for (const auto& alt : required[i].alternatives) {
        bool a = (m >> c.condition_index(alt.a)) & 1u;
        bool b = (m >> c.condition_index(alt.b)) & 1u;
        if (holds(alt, a, b)) {
          any = true;
          break;
        }
      }
      if (!any) entailed[i] = false;
    }
  });
  std::vector<ConstraintPattern> missing;
  for (std::size_t i = 0; i < required.size(); ++i)
    if (!entailed[i]) missing.push_back(required[i]);
  return missing;
}

struct Literal {
  std::string id;
  bool positive = true;

  auto operator<=>(const Literal&) const = default;
};

inline std::string to_string(const Literal& l) { return l.positive ? l.id : "!" + l.id; }

/// A conjunction of literals, sorted by id.
using Term = std::vector<Literal>;

inline std::string to_string(const Term& t) {
  std::vector<std::string> parts;
  for (const auto& l : t) parts.push_back(to_string(l));
  return text::join(parts, "&");
}

namespace detail {

inline std::vector<Term> dnf(const CauseExpr& e, bool negate) {
  using Op = CauseExpr::Op;
  switch (e.op) {
    case Op::Atom: return {{Literal{e.atom, !negate}}};
    case Op::Not: return dnf(e.operands.front(), !negate);
    case Op::And:
    case Op::Or: {
      bool conj = (e.op == Op::And) != negate;
      if (!conj) {
        std::vector<Term> out;
        for (const auto& o : e.operands) {
          auto t = dnf(o, negate);
          out.insert(out.end(), t.begin(), t.end());
        }
        return out;
      }
      std::vector<Term> acc{{}};
      for (const auto& o : e.operands) {
        std::vector<Term> next;
        for (const auto& left : acc)
          for (const auto& right : dnf(o, negate)) {
            Term t = left;
            t.insert(t.end(), right.begin(), right.end());
            next.push_back(std::move(t));
          }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

}  // namespace detail

/// Minimal disjunctive normal form: contradictory terms dropped, duplicate and
/// subsumed terms removed, terms in first-derivation order.
inline std::vector<Term> dnf_terms(const CauseExpr& e) {
  std::vector<Term> raw = detail::dnf(e, false);
  std::vector<Term> clean;
  for (auto& t : raw) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    bool contradictory = false;
    for (std::size_t i = 1; i < t.size(); ++i)
      if (t[i].id == t[i - 1].id) contradictory = true;
    if (!contradictory && std::find(clean.begin(), clean.end(), t) == clean.end()) clean.push_back(std::move(t));
  }
  std::vector<Term> out;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    bool subsumed = false;
    for (std::size_t j = 0; j < clean.size() && !subsumed; ++j) {
      if (i == j || clean[j].size() >= clean[i].size()) continue;
      subsumed = std::includes(clean[i].begin(), clean[i].end(), clean[j].begin(), clean[j].end());
    }
    if (!subsumed) out.push_back(clean[i]);
  }
  return out;
}

}  // namespace requireceg::ceg
