/// @file graph.hpp
/// @brief Causal-effect graph value types.
///
/// A graph declares atomic conditions (C...) and effects (E...), then relates
/// them with three statement families:
///
///   - links       `AND(OR(C1,C2),C3)=E1`  effect holds iff the cause holds
///   - constraints `EXC(C1,C2)` and friends over two conditions
///   - restrictions `MSK(E1,E2)` over two effects
///
/// Each effect has at most one link. Several statements targeting the same
/// effect are merged into one disjunction when the graph is assembled.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "requireceg/errors.hpp"

namespace requireceg::ceg {

enum class NodeKind { Condition, Effect };

inline const char* node_kind_name(NodeKind k) noexcept { return k == NodeKind::Condition ? "condition" : "effect"; }

struct AtomicNode {
  std::string id;
  NodeKind kind = NodeKind::Condition;
  std::string description;
  bool trigger = false;  // condition a user action brings about (rendered as When)

  bool operator==(const AtomicNode&) const = default;
};

/// True when `id` has the shape of a node id: C or E followed by at least one
/// letter, digit or underscore.
inline bool is_node_id(std::string_view id) noexcept {
  if (id.size() < 2 || (id[0] != 'C' && id[0] != 'E')) return false;
  for (std::size_t i = 1; i < id.size(); ++i) {
    char c = id[i];
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

inline NodeKind kind_of_id(std::string_view id) noexcept { return id[0] == 'C' ? NodeKind::Condition : NodeKind::Effect; }

struct CauseExpr {
  enum class Op { Atom, And, Or, Not };

  Op op = Op::Atom;
  std::string atom;                // Op::Atom only
  std::vector<CauseExpr> operands;  // And/Or: >= 2, Not: 1

  static CauseExpr atom_of(std::string id) {
    CauseExpr e;
    e.atom = std::move(id);
    return e;
  }
  static CauseExpr not_of(CauseExpr inner) {
    CauseExpr e;
    e.op = Op::Not;
    e.operands.push_back(std::move(inner));
    return e;
  }
  static CauseExpr and_of(std::vector<CauseExpr> xs) {
    CauseExpr e;
    e.op = Op::And;
    e.operands = std::move(xs);
    return e;
  }
  static CauseExpr or_of(std::vector<CauseExpr> xs) {
    CauseExpr e;
    e.op = Op::Or;
    e.operands = std::move(xs);
    return e;
  }

  bool operator==(const CauseExpr&) const = default;
};

inline const char* op_name(CauseExpr::Op op) noexcept {
  switch (op) {
    case CauseExpr::Op::Atom: return "DIR";
    case CauseExpr::Op::And: return "AND";
    case CauseExpr::Op::Or: return "OR";
    case CauseExpr::Op::Not: return "NOT";
  }
  return "DIR";
}

/// Nested form without the DIR wrapper: `AND(OR(C1,C2),C3)`, `C1`.
inline std::string to_string(const CauseExpr& e) {
  if (e.op == CauseExpr::Op::Atom) return e.atom;
  std::string out = op_name(e.op);
  out += '(';
  for (std::size_t i = 0; i < e.operands.size(); ++i) {
    if (i) out += ',';
    out += to_string(e.operands[i]);
  }
  out += ')';
  return out;
}

/// Condition ids in first-appearance order.
inline void collect_atoms(const CauseExpr& e, std::vector<std::string>& out) {
  if (e.op == CauseExpr::Op::Atom) {
    if (std::find(out.begin(), out.end(), e.atom) == out.end()) out.push_back(e.atom);
    return;
  }
  for (const auto& o : e.operands) collect_atoms(o, out);
}

inline std::vector<std::string> atoms_of(const CauseExpr& e) {
  std::vector<std::string> out;
  collect_atoms(e, out);
  return out;
}

/// Boolean value of `e`, with atoms resolved by `value(id)`.
template <typename Lookup>
bool eval_cause(const CauseExpr& e, const Lookup& value) {
  switch (e.op) {
    case CauseExpr::Op::Atom: return value(e.atom);
    case CauseExpr::Op::Not: return !eval_cause(e.operands.front(), value);
    case CauseExpr::Op::And:
      for (const auto& o : e.operands)
        if (!eval_cause(o, value)) return false;
      return true;
    case CauseExpr::Op::Or:
      for (const auto& o : e.operands)
        if (eval_cause(o, value)) return true;
      return false;
  }
  return false;
}

struct CausalLink {
  CauseExpr cause;
  std::string effect;

  bool operator==(const CausalLink&) const = default;
};

/// `DIR(C1)=E1` for a bare atom, `AND(C1,C2)=E1` otherwise.
inline std::string to_string(const CausalLink& l) {
  std::string cause = l.cause.op == CauseExpr::Op::Atom ? "DIR(" + l.cause.atom + ")" : to_string(l.cause);
  return cause + "=" + l.effect;
}

enum class ConstraintOp { EXC, INC, REQ, XOR };

inline const char* op_name(ConstraintOp op) noexcept {
  switch (op) {
    case ConstraintOp::EXC: return "EXC";
    case ConstraintOp::INC: return "INC";
    case ConstraintOp::REQ: return "REQ";
    case ConstraintOp::XOR: return "XOR";
  }
  return "EXC";
}

inline std::optional<ConstraintOp> constraint_op_from(std::string_view upper) {
  if (upper == "EXC") return ConstraintOp::EXC;
  if (upper == "INC") return ConstraintOp::INC;
  if (upper == "REQ") return ConstraintOp::REQ;
  if (upper == "XOR") return ConstraintOp::XOR;
  return std::nullopt;
}

struct Constraint {
  ConstraintOp op = ConstraintOp::EXC;
  std::string a;
  std::string b;

  bool operator==(const Constraint&) const = default;
};

inline std::string to_string(const Constraint& c) { return std::string(op_name(c.op)) + "(" + c.a + "," + c.b + ")"; }

inline bool holds(const Constraint& c, bool a, bool b) noexcept {
  switch (c.op) {
    case ConstraintOp::EXC: return !(a && b);
    case ConstraintOp::INC: return a || b;
    case ConstraintOp::REQ: return !a || b;
    case ConstraintOp::XOR: return a != b;
  }
  return true;
}

/// MSK(masker, masked): masked is forbidden while masker occurs.
struct Restriction {
  std::string masker;
  std::string masked;

  bool operator==(const Restriction&) const = default;
};

inline std::string to_string(const Restriction& r) { return "MSK(" + r.masker + "," + r.masked + ")"; }

struct CausalEffectGraph {
  std::map<std::string, AtomicNode> nodes;
  std::vector<CausalLink> links;  // sorted by effect id, one per effect
  std::vector<Constraint> constraints;
  std::vector<Restriction> restrictions;
  std::vector<std::string> raw_statements;  // statement text as given, including rejected ones
  std::vector<std::string> rejected;        // raw statements that failed the formal check
  std::vector<std::string> merge_log;

  std::vector<std::string> ids_of(NodeKind kind) const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes)
      if (n.kind == kind) out.push_back(id);
    return out;
  }
  std::vector<std::string> conditions() const { return ids_of(NodeKind::Condition); }
  std::vector<std::string> effects() const { return ids_of(NodeKind::Effect); }

  const AtomicNode& node(const std::string& id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw PreconditionViolation("undeclared node " + id);
    return it->second;
  }

  const CausalLink* link_for(std::string_view effect) const {
    for (const auto& l : links)
      if (l.effect == effect) return &l;
    return nullptr;
  }

  /// Graph equality over semantics-bearing fields only.
  bool same_structure(const CausalEffectGraph& o) const {
    return nodes == o.nodes && links == o.links && constraints == o.constraints && restrictions == o.restrictions;
  }
};

/// Rendered statement texts of a graph in canonical order: links, then
/// constraints, then restrictions, each block sorted.
inline std::vector<std::string> statement_texts(const CausalEffectGraph& g) {
  std::vector<std::string> links, rest;
  for (const auto& l : g.links) links.push_back(to_string(l));
  for (const auto& c : g.constraints) rest.push_back(to_string(c));
  for (const auto& r : g.restrictions) rest.push_back(to_string(r));
  std::sort(links.begin(), links.end());
  std::sort(rest.begin(), rest.end());
  links.insert(links.end(), rest.begin(), rest.end());
  return links;
}

inline std::string declaration_text(const AtomicNode& n) {
  return n.id + ": " + (n.trigger ? "[trigger] " : "") + n.description;
}

/// Canonical DSL text: declarations (sorted by id), a blank line, then statements.
inline std::string serialize(const CausalEffectGraph& g) {
  std::string out;
  for (const auto& [id, n] : g.nodes) out += declaration_text(n) + "\n";
  auto stmts = statement_texts(g);
  if (!stmts.empty() && !g.nodes.empty()) out += "\n";
  for (const auto& s : stmts) out += s + "\n";
  return out;
}

}  // namespace requireceg::ceg
