#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "requireceg/ceg/graph.hpp"
#include "requireceg/errors.hpp"

namespace requireceg::ceg {

/// Condition id -> value. Must cover every declared condition.
using TruthAssignment = std::map<std::string, bool>;

struct Evaluation {
  std::map<std::string, bool> effects;  // every declared effect; unlinked ones are false
  std::vector<Constraint> violated_constraints;
  std::vector<std::string> masked_effects;  // E2 of each MSK(E1,E2) with both effects true

  bool operator==(const Evaluation&) const = default;
};

inline constexpr std::size_t kDefaultEnumerationCap = 20;

/// Index-based form of a graph for fast repeated evaluation. Bit i of a mask
/// is the value of the i-th condition in sorted id order.
class CompiledGraph {
 public:
  using Mask = std::uint64_t;

  explicit CompiledGraph(const CausalEffectGraph& g) : graph_(&g), conditions_(g.conditions()), effects_(g.effects()) {
    for (std::size_t i = 0; i < conditions_.size(); ++i) cond_index_[conditions_[i]] = i;
    for (std::size_t i = 0; i < effects_.size(); ++i) effect_index_[effects_[i]] = i;
    for (const auto& l : g.links) links_.push_back({compile(l.cause), effect_index_.at(l.effect)});
    for (const auto& c : g.constraints) constraints_.push_back({c, cond_index_.at(c.a), cond_index_.at(c.b)});
    for (const auto& r : g.restrictions) restrictions_.push_back({effect_index_.at(r.masker), effect_index_.at(r.masked)});
  }

  const std::vector<std::string>& conditions() const noexcept { return conditions_; }
  const std::vector<std::string>& effects() const noexcept { return effects_; }
  std::size_t condition_index(const std::string& id) const { return cond_index_.at(id); }
  std::size_t link_count() const noexcept { return links_.size(); }

  bool link_fires(std::size_t link, Mask m) const { return eval(links_[link].cause, m); }

  bool consistent(Mask m) const {
    for (const auto& c : constraints_)
      if (!holds(c.c, bit(m, c.a), bit(m, c.b))) return false;
    return true;
  }

  /// Effect values in effects() order.
  std::vector<bool> effect_values(Mask m) const {
    std::vector<bool> out(effects_.size(), false);
    for (const auto& l : links_) out[l.effect] = eval(l.cause, m);
    return out;
  }

  bool any_link_fires(Mask m) const {
    for (const auto& l : links_)
      if (eval(l.cause, m)) return true;
    return false;
  }

  Evaluation evaluate(Mask m) const {
    Evaluation ev;
    auto values = effect_values(m);
    for (std::size_t i = 0; i < effects_.size(); ++i) ev.effects[effects_[i]] = values[i];
    for (const auto& c : constraints_)
      if (!holds(c.c, bit(m, c.a), bit(m, c.b))) ev.violated_constraints.push_back(c.c);
    for (const auto& r : restrictions_)
      if (values[r.masker] && values[r.masked]) ev.masked_effects.push_back(effects_[r.masked]);
    std::sort(ev.masked_effects.begin(), ev.masked_effects.end());
    ev.masked_effects.erase(std::unique(ev.masked_effects.begin(), ev.masked_effects.end()), ev.masked_effects.end());
    return ev;
  }

  Mask mask_of(const TruthAssignment& a) const {
    for (const auto& [id, v] : a)
      if (!cond_index_.count(id)) throw PreconditionViolation("assignment names undeclared condition " + id);
    Mask m = 0;
    for (std::size_t i = 0; i < conditions_.size(); ++i) {
      auto it = a.find(conditions_[i]);
      if (it == a.end()) throw IncompleteAssignment(conditions_[i]);
      if (it->second) m |= Mask{1} << i;
    }
    return m;
  }

  TruthAssignment assignment_of(Mask m) const {
    TruthAssignment a;
    for (std::size_t i = 0; i < conditions_.size(); ++i) a[conditions_[i]] = bit(m, i);
    return a;
  }

  /// Every assignment in enumeration order: true before false, the first
  /// condition id varying slowest.
  template <typename F>
  void for_each_mask(std::size_t cap, F&& f) const {
    const std::size_t k = conditions_.size();
    if (k > cap) throw TooManyConditions(k, cap);
    const Mask total = Mask{1} << k;
    const Mask all = total - 1;
    for (Mask r = 0; r < total; ++r) {
      // Reverse the bit order so condition 0 is the most significant digit,
      // then complement so the all-true assignment comes first.
      Mask m = 0;
      for (std::size_t i = 0; i < k; ++i)
        if ((r >> (k - 1 - i)) & 1u) m |= Mask{1} << i;
      f(all & ~m);
    }
  }

  const CausalEffectGraph& graph() const noexcept { return *graph_; }

 private:
  struct Node {
    CauseExpr::Op op;
    std::size_t atom = 0;
    std::vector<Node> kids;
  };
  struct Link {
    Node cause;
    std::size_t effect;
  };
  struct IndexedConstraint {
    Constraint c;
    std::size_t a, b;
  };
  struct IndexedRestriction {
    std::size_t masker, masked;
  };

  static bool bit(Mask m, std::size_t i) noexcept { return ((m >> i) & 1u) != 0; }

  Node compile(const CauseExpr& e) const {
    Node n{e.op, 0, {}};
    if (e.op == CauseExpr::Op::Atom) {
      auto it = cond_index_.find(e.atom);
      if (it == cond_index_.end()) throw PreconditionViolation("cause references undeclared condition " + e.atom);
      n.atom = it->second;
    }
    for (const auto& o : e.operands) n.kids.push_back(compile(o));
    return n;
  }

  static bool eval(const Node& n, Mask m) {
    switch (n.op) {
      case CauseExpr::Op::Atom: return bit(m, n.atom);
      case CauseExpr::Op::Not: return !eval(n.kids.front(), m);
      case CauseExpr::Op::And:
        for (const auto& k : n.kids)
          if (!eval(k, m)) return false;
        return true;
      case CauseExpr::Op::Or:
        for (const auto& k : n.kids)
          if (eval(k, m)) return true;
        return false;
    }
    return false;
  }

  const CausalEffectGraph* graph_;
  std::vector<std::string> conditions_;
  std::vector<std::string> effects_;
  std::map<std::string, std::size_t> cond_index_;
  std::map<std::string, std::size_t> effect_index_;
  std::vector<Link> links_;
  std::vector<IndexedConstraint> constraints_;
  std::vector<IndexedRestriction> restrictions_;
};

/// Linked effects take the value of their cause; unlinked effects are false.
/// MSK clashes are reported, not resolved.
inline Evaluation evaluate(const CausalEffectGraph& g, const TruthAssignment& a) {
  CompiledGraph c(g);
  return c.evaluate(c.mask_of(a));
}

inline std::vector<TruthAssignment> consistent_assignments(const CausalEffectGraph& g, std::size_t cap = kDefaultEnumerationCap) {
  CompiledGraph c(g);
  std::vector<TruthAssignment> out;
  c.for_each_mask(cap, [&](CompiledGraph::Mask m) {
    if (c.consistent(m)) out.push_back(c.assignment_of(m));
  });
  return out;
}

inline std::string to_string(const TruthAssignment& a) {
  std::string out = "{";
  bool first = true;
  for (const auto& [id, v] : a) {
    if (!first) out += ", ";
    out += id + "=" + (v ? "T" : "F");
    first = false;
  }
  return out + "}";
}

}  // namespace requireceg::ceg
