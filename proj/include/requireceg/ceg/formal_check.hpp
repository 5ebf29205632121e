#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "requireceg/ceg/graph.hpp"
#include "requireceg/ceg/syntax.hpp"
#include "requireceg/errors.hpp"
#include "requireceg/text.hpp"

namespace requireceg::ceg {

enum class FormalErrorKind {
  UnknownOperator,
  ArityMismatch,
  EffectAsCause,
  ConditionAsEffect,
  EqualsInConstraint,
  UndeclaredNode,
  DuplicateEffectLink,
  SyntaxError,
};

inline const char* kind_name(FormalErrorKind k) noexcept {
  switch (k) {
    case FormalErrorKind::UnknownOperator: return "UnknownOperator";
    case FormalErrorKind::ArityMismatch: return "ArityMismatch";
    case FormalErrorKind::EffectAsCause: return "EffectAsCause";
    case FormalErrorKind::ConditionAsEffect: return "ConditionAsEffect";
    case FormalErrorKind::EqualsInConstraint: return "EqualsInConstraint";
    case FormalErrorKind::UndeclaredNode: return "UndeclaredNode";
    case FormalErrorKind::DuplicateEffectLink: return "DuplicateEffectLink";
    case FormalErrorKind::SyntaxError: return "SyntaxError";
  }
  return "?";
}

struct FormalError {
  std::string statement_text;
  FormalErrorKind kind = FormalErrorKind::SyntaxError;
  std::string detail;

  bool operator==(const FormalError&) const = default;
};

inline std::string to_string(const FormalError& e) {
  return std::string(kind_name(e.kind)) + " in '" + e.statement_text + "': " + e.detail;
}

using NodeTable = std::map<std::string, AtomicNode>;

struct Statement {
  enum class Kind { Link, Constraint, Restriction };
  Kind kind = Kind::Link;
  std::string text;
  CausalLink link;
  Constraint constraint;
  Restriction restriction;
};

inline std::string to_string(const Statement& s) {
  switch (s.kind) {
    case Statement::Kind::Link: return to_string(s.link);
    case Statement::Kind::Constraint: return to_string(s.constraint);
    case Statement::Kind::Restriction: return to_string(s.restriction);
  }
  return s.text;
}

/// Typed statement when well-formed, plus every error found in it.
struct StatementCheck {
  std::optional<Statement> statement;
  std::vector<FormalError> errors;
};

namespace detail {

class StatementChecker {
 public:
  StatementChecker(const std::string& text, const NodeTable& nodes) : text_(text), nodes_(nodes) {}

  StatementCheck run() {
    StatementCheck out;
    StatementSyntax syn;
    try {
      syn = parse_statement(text_);
    } catch (const DslSyntaxError& e) {
      add(FormalErrorKind::SyntaxError, e.detail() + " at column " + std::to_string(e.column()));
      out.errors = std::move(errors_);
      return out;
    }
    std::optional<Statement> st = top(syn);
    out.errors = std::move(errors_);
    if (out.errors.empty()) {
      st->text = text::trim(text_);
      out.statement = std::move(st);
    }
    return out;
  }

 private:
  void add(FormalErrorKind k, std::string detail) { errors_.push_back({text::trim(text_), k, std::move(detail)}); }

  std::optional<Statement> top(const StatementSyntax& syn) {
    const SyntaxNode& lhs = syn.lhs;
    if (!lhs.is_call) {
      add(FormalErrorKind::UnknownOperator, "'" + lhs.name + "' is not applied as an operator; write DIR(" + lhs.name + ")");
      return std::nullopt;
    }
    std::string op = text::to_upper(lhs.name);
    if (op == "DIR" || op == "NOT" || op == "AND" || op == "OR") {
      std::optional<CauseExpr> cause = cause_of(lhs);
      std::optional<std::string> effect;
      if (!syn.rhs) {
        add(FormalErrorKind::ArityMismatch, "link has no '=<effect>' side");
      } else {
        effect = effect_operand(*syn.rhs, "link target");
      }
      if (!cause || !effect) return std::nullopt;
      Statement s;
      s.kind = Statement::Kind::Link;
      s.link = {std::move(*cause), *effect};
      return s;
    }
    if (auto cop = constraint_op_from(op)) {
      if (syn.rhs) add(FormalErrorKind::EqualsInConstraint, op + " is a constraint and cannot be assigned to " + *syn.rhs);
      auto operands = binary_operands(lhs, op, NodeKind::Condition);
      if (!operands) return std::nullopt;
      Statement s;
      s.kind = Statement::Kind::Constraint;
      s.constraint = {*cop, operands->first, operands->second};
      return s;
    }
    if (op == "MSK") {
      if (syn.rhs) add(FormalErrorKind::EqualsInConstraint, "MSK is a restriction and cannot be assigned to " + *syn.rhs);
      auto operands = binary_operands(lhs, op, NodeKind::Effect);
      if (!operands) return std::nullopt;
      Statement s;
      s.kind = Statement::Kind::Restriction;
      s.restriction = {operands->first, operands->second};
      return s;
    }
    add(FormalErrorKind::UnknownOperator, "unknown operator '" + lhs.name + "'");
    return std::nullopt;
  }

  std::optional<std::string> effect_operand(const std::string& id, const char* role) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
      add(FormalErrorKind::UndeclaredNode, std::string(role) + " " + id + " is not declared");
      return std::nullopt;
    }
    if (it->second.kind != NodeKind::Effect) {
      add(FormalErrorKind::ConditionAsEffect, std::string(role) + " " + id + " is a condition");
      return std::nullopt;
    }
    return id;
  }

  std::optional<std::string> condition_operand(const std::string& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
      add(FormalErrorKind::UndeclaredNode, "cause " + id + " is not declared");
      return std::nullopt;
    }
    if (it->second.kind != NodeKind::Condition) {
      add(FormalErrorKind::EffectAsCause, id + " is an effect and cannot act as a cause");
      return std::nullopt;
    }
    return id;
  }

  std::optional<std::pair<std::string, std::string>> binary_operands(const SyntaxNode& call, const std::string& op, NodeKind want) {
    bool ok = true;
    if (call.args.size() != 2) {
      add(FormalErrorKind::ArityMismatch, op + " takes 2 operands, got " + std::to_string(call.args.size()));
      ok = false;
    }
    std::vector<std::string> ids;
    for (const auto& a : call.args) {
      if (a.is_call) {
        add(FormalErrorKind::ArityMismatch, op + " operands must be plain node ids, got " + text::to_upper(a.name) + "(...)");
        ok = false;
        continue;
      }
      auto id = want == NodeKind::Condition ? condition_operand(a.name) : effect_operand(a.name, "MSK operand");
      if (!id) ok = false;
      else ids.push_back(*id);
    }
    if (!ok) return std::nullopt;
    return std::make_pair(ids[0], ids[1]);
  }

  std::optional<CauseExpr> cause_of(const SyntaxNode& n) {
    if (!n.is_call) {
      auto id = condition_operand(n.name);
      if (!id) return std::nullopt;
      return CauseExpr::atom_of(*id);
    }
    std::string op = text::to_upper(n.name);
    std::vector<std::optional<CauseExpr>> parts;
    bool arity_ok = true;
    auto need = [&](bool cond, const std::string& what) {
      if (!cond) {
        add(FormalErrorKind::ArityMismatch, op + " " + what + ", got " + std::to_string(n.args.size()));
        arity_ok = false;
      }
    };
    if (op == "DIR" || op == "NOT") need(n.args.size() == 1, "takes exactly 1 operand");
    else if (op == "AND" || op == "OR") need(n.args.size() >= 2, "takes at least 2 operands");
    else if (constraint_op_from(op) || op == "MSK") {
      add(FormalErrorKind::UnknownOperator, op + " cannot appear inside a cause expression");
      return std::nullopt;
    } else {
      add(FormalErrorKind::UnknownOperator, "unknown operator '" + n.name + "'");
      return std::nullopt;
    }
    bool parts_ok = true;
    for (const auto& a : n.args) {
      parts.push_back(cause_of(a));
      if (!parts.back()) parts_ok = false;
    }
    if (!arity_ok || !parts_ok) return std::nullopt;
    if (op == "DIR") return std::move(*parts[0]);
    if (op == "NOT") return CauseExpr::not_of(std::move(*parts[0]));
    std::vector<CauseExpr> xs;
    for (auto& p : parts) xs.push_back(std::move(*p));
    return op == "AND" ? CauseExpr::and_of(std::move(xs)) : CauseExpr::or_of(std::move(xs));
  }

  const std::string& text_;
  const NodeTable& nodes_;
  std::vector<FormalError> errors_;
};

/// True when `e` holds under every assignment of its atoms. Expressions over
/// more than 20 atoms are not examined and count as non-tautologies.
inline bool is_tautology(const CauseExpr& e) {
  auto atoms = atoms_of(e);
  if (atoms.size() > 20) return false;
  const std::size_t n = atoms.size();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    auto value = [&](const std::string& id) {
      for (std::size_t i = 0; i < n; ++i)
        if (atoms[i] == id) return ((m >> i) & 1u) != 0;
      return false;
    };
    if (!eval_cause(e, value)) return false;
  }
  return true;
}

/// Flattened, deduplicated disjunction of two causes.
inline CauseExpr or_merge(const CauseExpr& a, const CauseExpr& b) {
  std::vector<CauseExpr> parts;
  auto push = [&](const CauseExpr& x) {
    if (std::find(parts.begin(), parts.end(), x) == parts.end()) parts.push_back(x);
  };
  for (const CauseExpr* side : {&a, &b}) {
    if (side->op == CauseExpr::Op::Or)
      for (const auto& o : side->operands) push(o);
    else push(*side);
  }
  if (parts.size() == 1) return parts.front();
  return CauseExpr::or_of(std::move(parts));
}

}  // namespace detail

inline StatementCheck check_statement(const std::string& text, const NodeTable& nodes) {
  return detail::StatementChecker(text, nodes).run();
}

/// Outcome of assembling a graph from declarations and statement texts.
struct AssembleResult {
  CausalEffectGraph graph;
  std::vector<Statement> accepted;
  std::vector<std::string> rejected;
  std::vector<FormalError> errors;
};

/// Lenient graph construction: well-formed statements become graph content,
/// the rest are kept as rejected text with their errors. Links that share an
/// effect are merged into one disjunction. A link is rejected as
/// DuplicateEffectLink when that merge would make its effect fire under every
/// assignment although neither side does alone.
inline AssembleResult assemble(const NodeTable& nodes, const std::vector<std::string>& raw_statements) {
  AssembleResult r;
  r.graph.nodes = nodes;
  std::map<std::string, CauseExpr> merged;
  std::map<std::string, std::vector<std::string>> sources;
  for (const auto& raw : raw_statements) {
    std::string text = text::trim(raw);
    if (text.empty()) continue;
    r.graph.raw_statements.push_back(text);
    StatementCheck c = check_statement(text, nodes);
    if (!c.statement) {
      r.errors.insert(r.errors.end(), c.errors.begin(), c.errors.end());
      r.rejected.push_back(text);
      continue;
    }
    Statement& st = *c.statement;
    if (st.kind == Statement::Kind::Link) {
      const CausalLink& l = st.link;
      auto it = merged.find(l.effect);
      if (it == merged.end()) {
        merged.emplace(l.effect, l.cause);
      } else {
        CauseExpr next = detail::or_merge(it->second, l.cause);
        if (detail::is_tautology(next) && !detail::is_tautology(it->second) && !detail::is_tautology(l.cause)) {
          r.errors.push_back({text, FormalErrorKind::DuplicateEffectLink,
                              "together with the earlier link, " + l.effect + " would occur under every assignment"});
          r.rejected.push_back(text);
          continue;
        }
        it->second = std::move(next);
      }
      sources[l.effect].push_back(text);
    } else if (st.kind == Statement::Kind::Constraint) {
      if (std::find(r.graph.constraints.begin(), r.graph.constraints.end(), st.constraint) == r.graph.constraints.end())
        r.graph.constraints.push_back(st.constraint);
    } else {
      if (std::find(r.graph.restrictions.begin(), r.graph.restrictions.end(), st.restriction) == r.graph.restrictions.end())
        r.graph.restrictions.push_back(st.restriction);
    }
    r.accepted.push_back(std::move(st));
  }
  for (auto& [effect, cause] : merged) {
    CausalLink link{std::move(cause), effect};
    const auto& from = sources[effect];
    if (from.size() > 1)
      r.graph.merge_log.push_back(effect + ": merged " + text::join(from, ", ") + " into " + to_string(link));
    r.graph.links.push_back(std::move(link));
  }
  auto by_text = [](const auto& a, const auto& b) { return to_string(a) < to_string(b); };
  std::sort(r.graph.constraints.begin(), r.graph.constraints.end(), by_text);
  std::sort(r.graph.restrictions.begin(), r.graph.restrictions.end(), by_text);
  r.graph.rejected = r.rejected;
  return r;
}

inline NodeTable node_table(const std::vector<AtomicNode>& nodes) {
  NodeTable t;
  for (const auto& n : nodes) {
    if (!is_node_id(n.id)) throw PreconditionViolation("'" + n.id + "' is not a node id");
    if (kind_of_id(n.id) != n.kind) throw PreconditionViolation(n.id + " is declared as a " + node_kind_name(n.kind));
    if (text::trim_view(n.description).empty()) throw PreconditionViolation(n.id + " has an empty description");
    if (!t.emplace(n.id, n).second) throw PreconditionViolation(n.id + " is declared twice");
  }
  return t;
}

inline AssembleResult assemble(const std::vector<AtomicNode>& nodes, const std::vector<std::string>& raw_statements) {
  return assemble(node_table(nodes), raw_statements);
}

/// Every formal error in a statement list, in statement order.
inline std::vector<FormalError> check_formal(const std::vector<std::string>& raw_statements, const NodeTable& nodes) {
  return assemble(nodes, raw_statements).errors;
}

}  // namespace requireceg::ceg
