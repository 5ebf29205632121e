#include <gtest/gtest.h>

#include <deque>

#include "requireceg/elicitation/agents.hpp"
#include "requireceg/elicitation/feature_tree.hpp"

using namespace requireceg;
using namespace requireceg::elicitation;
using oracle::FunctionOracle;
using oracle::OracleRequest;

namespace {

// Answers from a queue per agent; records every prompt.
struct Scripted {
  std::map<std::string, std::deque<json>> answers;
  std::vector<OracleRequest> seen;

  FunctionOracle oracle() {
    return FunctionOracle([this](const OracleRequest& r) {
      seen.push_back(r);
      auto& q = answers.at(r.agent);
      json a = q.front();
      if (q.size() > 1) q.pop_front();
      return a.dump();
    });
  }
};

json leaf(const std::string& name) { return {{"name", name}}; }

}  // namespace

TEST(FeatureTree, ParsesThreeLevelsAndKano) {
  json j = {{"product", "Shop"},
            {"features", {{{"name", "Catalog"}, {"kano", "Must-be"}, {"children", {{{"name", "Search"}, {"children", {leaf("By name"), leaf("By tag")}}}}}},
                          leaf("Checkout")}}};
  std::vector<std::string> problems;
  auto t = tree_from_json(j, problems);
  ASSERT_TRUE(problems.empty()) << problems.front();
  EXPECT_EQ(depth(t.features[0]), 3u);
  auto ls = leaves(t);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0].path_text(), "Catalog > Search > By name");
  EXPECT_EQ(ls[2].slug, "checkout");
  EXPECT_EQ(t.features[0].children[0].children[1].level, Level::L3);
  EXPECT_EQ(t.features[0].kano, Kano::MustBe);
}

TEST(FeatureTree, DepthFourIsRejected) {
  json deep = {{"product", "P"},
               {"features", {{{"name", "A"}, {"children", {{{"name", "B"}, {"children", {{{"name", "C"}, {"children", {leaf("D")}}}}}}}}}}}};
  std::vector<std::string> problems;
  tree_from_json(deep, problems);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("three-level"), std::string::npos);
}

TEST(FeatureTree, DuplicateLeafNamesGetDistinctSlugs) {
  json j = {{"product", "P"}, {"features", {{{"name", "A"}, {"children", {leaf("Export")}}}, {{"name", "B"}, {"children", {leaf("Export")}}}}}};
  std::vector<std::string> problems;
  auto ls = leaves(tree_from_json(j, problems));
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0].slug, "export");
  EXPECT_EQ(ls[1].slug, "export-2");
}

TEST(FeatureTree, BadAnswerIsRepromptedWithFeedback) {
  Scripted s;
  s.answers["FeatureTreeGenerator"] = {json{{"product", ""}, {"features", json::array()}},
                                       json{{"product", "P"}, {"features", {leaf("Only")}}}};
  auto o = s.oracle();
  auto t = generate_feature_tree("A narrative.", o);
  EXPECT_EQ(t.product_name, "P");
  ASSERT_EQ(s.seen.size(), 2u);
  EXPECT_NE(s.seen[1].prompt.find("non-empty 'product'"), std::string::npos);
}

TEST(FeatureTree, TwoBadAnswersThrow) {
  Scripted s;
  s.answers["FeatureTreeGenerator"] = {json{{"product", "P"}, {"features", json::array()}}};
  auto o = s.oracle();
  EXPECT_THROW(generate_feature_tree("A narrative.", o), ValidationFailure);
  EXPECT_THROW(generate_feature_tree("  ", o), PreconditionViolation);
}

TEST(Atoms, DuplicateDescriptionsMerge) {
  json a = {{"conditions",
             {{{"id", "C1"}, {"description", "The user is logged in"}, {"trigger", false}},
              {{"id", "C2"}, {"description", "the user is logged in"}},
              {{"id", "C3"}, {"description", "The user clicks save"}, {"trigger", true}}}},
            {"effects", {{{"id", "E1"}, {"description", "The draft is stored"}}}}};
  std::vector<std::string> problems;
  auto r = atoms_from_json(a, problems);
  EXPECT_TRUE(problems.empty());
  ASSERT_EQ(r.atoms.size(), 3u);
  EXPECT_EQ(r.atoms[1].id, "C3");
  EXPECT_TRUE(r.atoms[1].trigger);
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.log[0], "merged C2 into C1 (same description)");
}

TEST(Atoms, InvalidIdsAndMissingKindsAreProblems) {
  std::vector<std::string> problems;
  atoms_from_json({{"conditions", {{{"id", "E1"}, {"description", "x"}}}}, {"effects", json::array()}}, problems);
  EXPECT_FALSE(problems.empty());
  problems.clear();
  atoms_from_json({{"conditions", {{{"id", "C1"}, {"description", "x"}}}}, {"effects", json::array()}}, problems);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("at least one condition and one effect"), std::string::npos);
}

TEST(Atoms, IdentifyRepromptsOnce) {
  Scripted s;
  s.answers["IdentifyCAndE"] = {json{{"conditions", json::array()}},
                                json{{"conditions", {{{"id", "C1"}, {"description", "a"}}}}, {"effects", {{{"id", "E1"}, {"description", "b"}}}}}};
  auto o = s.oracle();
  auto r = identify_atoms("The system does b when a.", o);
  EXPECT_EQ(r.atoms.size(), 2u);
  EXPECT_EQ(s.seen.size(), 2u);
}

TEST(Behavior, UserAndSystemBehaviorAndWarnings) {
  Scripted s;
  s.answers["AnalyzeUserBehavior"] = {json{{"user_behavior", "The user presses export."}}};
  s.answers["AnalyzeSystemBehavior"] = {json{{"system_behavior", "When the user presses export, the system writes a CSV."}}};
  auto o = s.oracle();
  FeatureNode n{"Export", Level::L1, Kano::Unlabeled, std::nullopt, {}};
  LeafRef l{&n, {"Export"}, "export"};
  auto ub = elicit_user_behavior(l, "Users export data.", o);
  auto sb = elicit_system_behavior(ub, o, "Export");
  EXPECT_TRUE(trigger_coverage_warnings(ub, sb).empty());
  EXPECT_EQ(trigger_coverage_warnings("The user uploads a photo.", "The system sends an email.").size(), 1u);
}

TEST(BuildCeg, KeepsFormalErrorsForHealing) {
  Scripted s;
  s.answers["BuildCEG"] = {json{{"statements", {"DIR(C1)=E1", "DIR(E1)=E1"}}}};
  auto o = s.oracle();
  std::vector<ceg::AtomicNode> atoms{{"C1", ceg::NodeKind::Condition, "a", false}, {"E1", ceg::NodeKind::Effect, "b", false}};
  auto r = build_ceg(atoms, "b when a", o);
  EXPECT_EQ(r.raw_statements.size(), 2u);
  ASSERT_EQ(r.assembled.errors.size(), 1u);
  EXPECT_EQ(r.assembled.errors[0].kind, ceg::FormalErrorKind::EffectAsCause);
  EXPECT_EQ(r.assembled.graph.links.size(), 1u);
}

TEST(Draft, MissingNarrativeIsRepromptedOnce) {
  const std::string no_narrative = "Feature: Export\n  Scenario: S\n    Given a\n    When b\n    Then c\n";
  const std::string good =
      "Feature: Export\n  Narrative:\n    As a clerk\n    I want to export\n    So that I can share\n"
      "  Scenario: S\n    Given a\n    When b\n    Then c\n";
  Scripted s;
  s.answers["GenerateGherkin"] = {json{{"feature", no_narrative}}, json{{"feature", good}}};
  auto o = s.oracle();
  FeatureNode n{"Export", Level::L1, Kano::Unlabeled, std::nullopt, {}};
  auto doc = draft_gherkin("b when a", n, o);
  ASSERT_TRUE(doc.narrative.has_value());
  EXPECT_EQ(doc.narrative->role, "clerk");
  ASSERT_EQ(s.seen.size(), 2u);
  EXPECT_NE(s.seen[1].prompt.find("no Narrative block"), std::string::npos);

  Scripted bad;
  bad.answers["GenerateGherkin"] = {json{{"feature", "Scenario: orphan"}}};
  auto ob = bad.oracle();
  EXPECT_THROW(draft_gherkin("b when a", n, ob), ValidationFailure);
}
