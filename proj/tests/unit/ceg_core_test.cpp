#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "requireceg/ceg/analysis.hpp"
#include "requireceg/ceg/dsl.hpp"
#include "requireceg/ceg/evaluate.hpp"
#include "requireceg/ceg/formal_check.hpp"

using namespace requireceg;
using namespace requireceg::ceg;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NodeTable decl(std::initializer_list<const char*> ids) {
  NodeTable t;
  for (const char* id : ids) t[id] = AtomicNode{id, kind_of_id(id), std::string("desc of ") + id};
  return t;
}

CausalEffectGraph graph_of(std::initializer_list<const char*> ids, std::vector<std::string> stmts) {
  auto r = assemble(decl(ids), stmts);
  EXPECT_TRUE(r.errors.empty()) << (r.errors.empty() ? "" : to_string(r.errors.front()));
  return r.graph;
}

std::vector<FormalErrorKind> kinds(const std::vector<FormalError>& es) {
  std::vector<FormalErrorKind> out;
  for (const auto& e : es) out.push_back(e.kind);
  return out;
}

}  // namespace

TEST(CegParse, NestedLink) {
  auto g = parse_ceg("C1: a\nC2: b\nC3: c\nE1: e\nAND(OR(C1,C2),C3)=E1\n");
  ASSERT_EQ(g.links.size(), 1u);
  const auto& cause = g.links[0].cause;
  EXPECT_EQ(cause.op, CauseExpr::Op::And);
  EXPECT_EQ(cause.operands[0].op, CauseExpr::Op::Or);
  EXPECT_EQ(to_string(g.links[0]), "AND(OR(C1,C2),C3)=E1");
}

TEST(CegParse, Constraint) {
  auto g = parse_ceg("C1: a\nC2: b\nEXC(C1,C2)\n");
  ASSERT_EQ(g.constraints.size(), 1u);
  EXPECT_EQ(g.constraints[0].op, ConstraintOp::EXC);
}

TEST(CegParse, SyntaxErrors) {
  EXPECT_THROW(parse_ceg("C1: a\nC2: b\nE1: e\nAND(C1,C2\n"), DslSyntaxError);
  EXPECT_THROW(parse_ceg("C1: a\nDIR(C1))=E1\n"), DslSyntaxError);
  EXPECT_THROW(parse_ceg("C1: a\nDIR(C1)=E1=E2\n"), DslSyntaxError);
  EXPECT_THROW(parse_ceg("C1: a\nDIR(C1)&E1\n"), DslSyntaxError);
  EXPECT_THROW(parse_ceg("X1: bad id\n"), DslSyntaxError);
  EXPECT_THROW(parse_ceg("C1:\n"), DslSyntaxError);
  EXPECT_THROW(parse_ceg("C1: a\nC1: b\n"), DslSyntaxError);
  try {
    parse_ceg("C1: a\n\nAND(C1,C2\n");
    FAIL();
  } catch (const DslSyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(CegParse, RejectedStatementsAreKept) {
  auto g = parse_ceg("C1: a\nE1: e\nE2: f\nDIR(E1)=E2\nDIR(C1)=E1\n");
  EXPECT_EQ(g.raw_statements.size(), 2u);
  EXPECT_EQ(g.rejected, std::vector<std::string>{"DIR(E1)=E2"});
  EXPECT_EQ(g.links.size(), 1u);
}

TEST(CegParse, TriggerMarkerAndRoundTrip) {
  auto g = parse_ceg(read(FIXTURE_DIR "/ceg/file_update.ceg"));
  EXPECT_EQ(g.links.size(), 3u);
  EXPECT_EQ(g.constraints.size(), 1u);
  auto h = parse_ceg("C1: [trigger] the user clicks\nE1: done\nDIR(C1)=E1\n");
  EXPECT_TRUE(h.nodes.at("C1").trigger);
  EXPECT_EQ(h.nodes.at("C1").description, "the user clicks");
  auto text = serialize(g);
  EXPECT_TRUE(parse_ceg(text).same_structure(g));
  EXPECT_EQ(serialize(parse_ceg(text)), text);
  EXPECT_TRUE(parse_ceg(serialize(h)).same_structure(h));
}

TEST(CegParse, OperatorsAreCaseInsensitive) {
  auto g = parse_ceg("C1: a\nC2: b\nE1: e\nand(c1_x,C2)=E1\n" + std::string{});
  EXPECT_EQ(g.rejected.size(), 1u);
  auto h = parse_ceg("C1: a\nC2: b\nE1: e\nand(C1,C2)=E1\nexc(C1,C2)\n");
  EXPECT_EQ(to_string(h.links[0]), "AND(C1,C2)=E1");
  EXPECT_EQ(to_string(h.constraints[0]), "EXC(C1,C2)");
}

TEST(CegParse, SameEffectLinksMerge) {
  auto g = graph_of({"C3", "C4", "E3"}, {"DIR(C3)=E3", "OR(C3,C4)=E3", "DIR(C4)=E3"});
  ASSERT_EQ(g.links.size(), 1u);
  EXPECT_EQ(to_string(g.links[0]), "OR(C3,C4)=E3");
  ASSERT_EQ(g.merge_log.size(), 1u);
}

TEST(FormalCheck, PaperExamples) {
  auto nodes = decl({"C1", "C2", "E1", "E2"});
  EXPECT_EQ(kinds(check_formal({"DIR(E1)=E2"}, nodes)), std::vector{FormalErrorKind::EffectAsCause});
  EXPECT_EQ(kinds(check_formal({"EXC(C1,C2)=E1"}, nodes)), std::vector{FormalErrorKind::EqualsInConstraint});
  EXPECT_EQ(kinds(check_formal({"AND(C1)=E1"}, nodes)), std::vector{FormalErrorKind::ArityMismatch});
}

TEST(FormalCheck, OtherKinds) {
  auto nodes = decl({"C1", "C2", "E1", "E2"});
  EXPECT_EQ(kinds(check_formal({"FOO(C1)=E1"}, nodes)), std::vector{FormalErrorKind::UnknownOperator});
  EXPECT_EQ(kinds(check_formal({"DIR(C1)=C2"}, nodes)), std::vector{FormalErrorKind::ConditionAsEffect});
  EXPECT_EQ(kinds(check_formal({"DIR(C9)=E1"}, nodes)), std::vector{FormalErrorKind::UndeclaredNode});
  EXPECT_EQ(kinds(check_formal({"MSK(C1,E2)"}, nodes)), std::vector{FormalErrorKind::ConditionAsEffect});
  EXPECT_EQ(kinds(check_formal({"REQ(E1,C2)"}, nodes)), std::vector{FormalErrorKind::EffectAsCause});
  EXPECT_EQ(kinds(check_formal({"DIR(C1)=E1", "NOT(C1)=E1"}, nodes)), std::vector{FormalErrorKind::DuplicateEffectLink});
  EXPECT_EQ(kinds(check_formal({"AND(C1,C2"}, nodes)), std::vector{FormalErrorKind::SyntaxError});
  EXPECT_EQ(kinds(check_formal({"AND(C1,E1,C9)=E2"}, nodes)),
            (std::vector{FormalErrorKind::EffectAsCause, FormalErrorKind::UndeclaredNode}));
  EXPECT_TRUE(check_formal({"AND(OR(C1,C2),NOT(C1))=E1", "XOR(C1,C2)", "MSK(E1,E2)"}, nodes).empty());
}

TEST(Evaluate, Dir) {
  auto g = graph_of({"C1", "E1"}, {"DIR(C1)=E1"});
  auto ev = evaluate(g, {{"C1", true}});
  EXPECT_TRUE(ev.effects.at("E1"));
  EXPECT_TRUE(ev.violated_constraints.empty());
}

TEST(Evaluate, FileUpdateExample) {
  auto g = parse_ceg(read(FIXTURE_DIR "/ceg/file_update.ceg"));
  auto ev = evaluate(g, {{"C1", false}, {"C2", true}, {"C3", true}});
  EXPECT_TRUE(ev.effects.at("E1"));
  EXPECT_FALSE(ev.effects.at("E2"));
  EXPECT_FALSE(ev.effects.at("E3"));
  EXPECT_TRUE(ev.violated_constraints.empty());
  // Brute-force the other seven rows against the formulas written out by hand.
  for (int m = 0; m < 8; ++m) {
    bool c1 = m & 1, c2 = m & 2, c3 = m & 4;
    auto e = evaluate(g, {{"C1", c1}, {"C2", c2}, {"C3", c3}});
    EXPECT_EQ(e.effects.at("E1"), (c1 || c2) && c3);
    EXPECT_EQ(e.effects.at("E2"), !(c1 || c2));
    EXPECT_EQ(e.effects.at("E3"), !c3);
    EXPECT_EQ(e.violated_constraints.size(), (c1 && c2) ? 1u : 0u);
  }
}

TEST(Evaluate, ExcViolation) {
  auto g = graph_of({"C1", "C2"}, {"EXC(C1,C2)"});
  auto ev = evaluate(g, {{"C1", true}, {"C2", true}});
  ASSERT_EQ(ev.violated_constraints.size(), 1u);
  EXPECT_EQ(to_string(ev.violated_constraints[0]), "EXC(C1,C2)");
}

TEST(Evaluate, MaskConflictAndUnlinked) {
  auto g = graph_of({"C1", "E1", "E2", "E3"}, {"DIR(C1)=E1", "DIR(C1)=E2", "MSK(E1,E2)"});
  auto ev = evaluate(g, {{"C1", true}});
  EXPECT_EQ(ev.masked_effects, std::vector<std::string>{"E2"});
  EXPECT_FALSE(ev.effects.at("E3"));
}

TEST(Evaluate, AssignmentErrors) {
  auto g = graph_of({"C1", "C2", "E1"}, {"AND(C1,C2)=E1"});
  EXPECT_THROW(evaluate(g, {{"C1", true}}), IncompleteAssignment);
  EXPECT_THROW(evaluate(g, {{"C1", true}, {"C2", true}, {"C7", true}}), PreconditionViolation);
}

TEST(Evaluate, NotInvolutionAndDeMorgan) {
  auto a = graph_of({"C1", "C2", "E1"}, {"NOT(NOT(AND(C1,C2)))=E1"});
  auto b = graph_of({"C1", "C2", "E1"}, {"AND(C1,C2)=E1"});
  auto c = graph_of({"C1", "C2", "E1"}, {"NOT(AND(C1,C2))=E1"});
  auto d = graph_of({"C1", "C2", "E1"}, {"OR(NOT(C1),NOT(C2))=E1"});
  for (auto& as : consistent_assignments(a)) {
    EXPECT_EQ(evaluate(a, as), evaluate(b, as));
    EXPECT_EQ(evaluate(c, as), evaluate(d, as));
  }
}

TEST(Enumerate, XorAndOrder) {
  auto g = graph_of({"C1", "C2"}, {"XOR(C1,C2)"});
  auto as = consistent_assignments(g);
  ASSERT_EQ(as.size(), 2u);
  EXPECT_EQ(as[0], (TruthAssignment{{"C1", true}, {"C2", false}}));
  EXPECT_EQ(as[1], (TruthAssignment{{"C1", false}, {"C2", true}}));
}

TEST(Enumerate, UnconstrainedAndUnsat) {
  auto g = graph_of({"C1", "C2", "C3", "C4"}, {});
  EXPECT_EQ(consistent_assignments(g).size(), 16u);
  auto u = graph_of({"C1", "C2"}, {"INC(C1,C2)", "EXC(C1,C2)", "REQ(C1,C2)", "REQ(C2,C1)"});
  EXPECT_TRUE(consistent_assignments(u).empty());
}

TEST(Enumerate, Cap) {
  NodeTable t;
  for (int i = 0; i < 21; ++i) {
    std::string id = "C" + std::to_string(i);
    t[id] = AtomicNode{id, NodeKind::Condition, "x"};
  }
  auto g = assemble(t, {}).graph;
  EXPECT_THROW(consistent_assignments(g), TooManyConditions);
  EXPECT_THROW(find_uncovered_conditions(g), TooManyConditions);

  auto small = graph_of({"C1", "C2", "C3", "C4", "C5"}, {});
  EXPECT_THROW(consistent_assignments(small, 4), TooManyConditions);
  EXPECT_EQ(consistent_assignments(small, 5).size(), 32u);
}

TEST(Uncovered, SingleDir) {
  auto g = graph_of({"C1", "E1"}, {"DIR(C1)=E1"});
  auto u = find_uncovered_conditions(g);
  ASSERT_EQ(u.size(), 1u);
  EXPECT_EQ(u[0], (TruthAssignment{{"C1", false}}));
  auto h = graph_of({"C1", "E1", "E2"}, {"DIR(C1)=E1", "NOT(C1)=E2"});
  EXPECT_TRUE(find_uncovered_conditions(h).empty());
}

TEST(Uncovered, TimeTravelNoSelection) {
  auto g = parse_ceg(read(FIXTURE_DIR "/ceg/time_travel.ceg"));
  ASSERT_TRUE(g.rejected.empty());
  auto u = find_uncovered_conditions(g);
  ASSERT_EQ(u.size(), 4u);
  auto common = common_literals(u);
  EXPECT_EQ(common, (std::map<std::string, bool>{{"C_AE", false}, {"C_IE", false}, {"C_Ren", false}}));
}

TEST(Coverage, TimeTravelMissingRen) {
  auto g = parse_ceg(read(FIXTURE_DIR "/ceg/time_travel.ceg"));
  auto patterns = parse_patterns(read(FIXTURE_DIR "/ceg/time_travel.patterns"));
  ASSERT_EQ(patterns.size(), 3u);
  auto missing = diff_constraint_coverage(g, patterns);
  ASSERT_EQ(missing.size(), 1u);
  EXPECT_EQ(to_string(missing[0]), "REQ(C_Ren,C_intro) | REQ(C_Ren,C_pre)");
}

TEST(Coverage, TrivialCases) {
  auto g = graph_of({"C1", "C2"}, {"REQ(C1,C2)"});
  EXPECT_TRUE(diff_constraint_coverage(g, {}).empty());
  EXPECT_TRUE(diff_constraint_coverage(g, parse_patterns("REQ(C1,C2)")).empty());
  EXPECT_EQ(diff_constraint_coverage(g, parse_patterns("REQ(C2,C1)")).size(), 1u);
  EXPECT_THROW(diff_constraint_coverage(g, parse_patterns("REQ(C1,C9)")), PreconditionViolation);
}

TEST(Dnf, Terms) {
  auto g = graph_of({"C1", "C2", "C3", "E1", "E2"}, {"AND(OR(C1,C2),C3)=E1", "NOT(OR(C1,C2))=E2"});
  auto t1 = dnf_terms(g.link_for("E1")->cause);
  ASSERT_EQ(t1.size(), 2u);
  EXPECT_EQ(to_string(t1[0]), "C1&C3");
  EXPECT_EQ(to_string(t1[1]), "C2&C3");
  auto t2 = dnf_terms(g.link_for("E2")->cause);
  ASSERT_EQ(t2.size(), 1u);
  EXPECT_EQ(to_string(t2[0]), "!C1&!C2");
  auto t3 = dnf_terms(graph_of({"C1", "C2", "E1"}, {"OR(C1,AND(C1,C2))=E1"}).links[0].cause);
  ASSERT_EQ(t3.size(), 1u);
}
