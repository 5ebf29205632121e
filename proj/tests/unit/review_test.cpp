#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "requireceg/ceg/dsl.hpp"
#include "requireceg/gherkin/parser.hpp"
#include "requireceg/gherkin/writer.hpp"
#include "requireceg/lint/lint.hpp"
#include "requireceg/review/review.hpp"

using namespace requireceg;
using namespace requireceg::review;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kLoginCeg =
    "C1: [trigger] the user submits the login form\n"
    "C2: the password is correct\n"
    "E1: the dashboard is shown\n"
    "E2: an error message is shown\n"
    "AND(C1,C2)=E1\n"
    "AND(C1,NOT(C2))=E2\n";

gherkin::GherkinDocument feature(const std::string& body) { return gherkin::parse_feature("Feature: Login\n" + body); }

bool has_defect(const ModifiedScenario& m, DefectKind k, const std::string& atom) {
  for (const auto& d : m.defects)
    if (d.kind == k && d.atom == atom) return true;
  return false;
}

}  // namespace

TEST(Binding, AnnotationLexicalAndNegation) {
  auto g = ceg::parse_ceg(kLoginCeg);
  gherkin::Step s;
  s.kind = gherkin::StepKind::Precondition;
  s.text = "something else entirely [!C2]";
  auto r = bind_step(s, {0, 0}, g);
  ASSERT_TRUE(r.binding);
  EXPECT_EQ(r.binding->atom, "C2");
  EXPECT_EQ(r.binding->polarity, Polarity::Negative);
  EXPECT_EQ(r.binding->method, BindMethod::Annotation);

  s.text = "the password is not correct";
  r = bind_step(s, {0, 0}, g);
  ASSERT_TRUE(r.binding);
  EXPECT_EQ(r.binding->atom, "C2");
  EXPECT_EQ(r.binding->polarity, Polarity::Negative);

  s.text = "the moon is full";
  r = bind_step(s, {0, 0}, g);
  EXPECT_FALSE(r.binding);
  EXPECT_EQ(r.reason, "no condition matches");
}

TEST(Binding, OracleFallback) {
  auto g = ceg::parse_ceg(kLoginCeg);
  gherkin::Step s;
  s.kind = gherkin::StepKind::Action;
  s.text = "the user lands on their home screen";
  oracle::FunctionOracle o([](const oracle::OracleRequest&) { return R"({"atom": "E1", "polarity": "positive"})"; });
  auto r = bind_step(s, {0, 0}, g, &o);
  ASSERT_TRUE(r.binding);
  EXPECT_EQ(r.binding->atom, "E1");
  EXPECT_EQ(r.binding->method, BindMethod::Oracle);

  oracle::FunctionOracle wrong([](const oracle::OracleRequest&) { return R"({"atom": "C1"})"; });
  EXPECT_FALSE(bind_step(s, {0, 0}, g, &wrong).binding);
}

TEST(Review, ConsistentScenarioIsKept) {
  auto doc = feature(
      "  Scenario: Good login\n    Given the password is correct\n    When the user submits the login form\n"
      "    Then the dashboard is shown\n"
      "  Scenario: Bad login\n    Given the password is not correct\n    When the user submits the login form\n"
      "    Then an error message is shown\n");
  auto r = review::review(doc, ceg::parse_ceg(kLoginCeg), nullptr, {});
  EXPECT_EQ(r.report.kept.size(), 2u);
  EXPECT_TRUE(r.report.modified.empty());
  EXPECT_TRUE(r.report.added.empty());
  EXPECT_DOUBLE_EQ(r.report.coverage, 1.0);
  EXPECT_EQ(r.revised, doc);
}

TEST(Review, WrongEffectIsReplaced) {
  auto doc = feature(
      "  Scenario: Bad login\n    Given the password is not correct\n    When the user submits the login form\n"
      "    Then the dashboard is shown\n");
  ReviewOptions opt;
  opt.synthesize = false;
  auto r = review::review(doc, ceg::parse_ceg(kLoginCeg), nullptr, opt);
  ASSERT_EQ(r.report.modified.size(), 1u);
  EXPECT_TRUE(r.report.added.empty());
  std::string out = gherkin::serialize(r.revised);
  EXPECT_NE(out.find("an error message is shown"), std::string::npos);
  EXPECT_EQ(out.find("Then the dashboard is shown"), std::string::npos);
}

TEST(Review, SynthesizesUncoveredBranch) {
  auto doc = feature(
      "  Scenario: Good login\n    Given the password is correct\n    When the user submits the login form\n"
      "    Then the dashboard is shown\n");
  auto g = ceg::parse_ceg(kLoginCeg);
  auto r = review::review(doc, g, nullptr, {});
  ASSERT_EQ(r.report.added.size(), 1u);
  EXPECT_EQ(r.report.added[0].branch.effect, "E2");
  EXPECT_EQ(r.report.added[0].defect.kind, DefectKind::UncoveredLink);
  ReviewOptions off;
  off.synthesize = false;
  auto r2 = review::review(doc, g, nullptr, off);
  EXPECT_TRUE(r2.report.added.empty());
  EXPECT_DOUBLE_EQ(r2.report.coverage, 0.5);
}

TEST(Review, UnbindableScenarioIsReportedNotEdited) {
  auto doc = feature("  Scenario: Weather\n    Given it rains\n    When clouds gather\n    Then umbrellas open\n");
  ReviewOptions opt;
  opt.synthesize = false;
  auto r = review::review(doc, ceg::parse_ceg(kLoginCeg), nullptr, opt);
  ASSERT_EQ(r.report.unbindable.size(), 1u);
  EXPECT_EQ(r.report.unbindable[0], "Weather");
  EXPECT_EQ(r.revised.scenarios[0], doc.scenarios[0]);
}

TEST(Review, OutlineExpandsPerRow) {
  auto sc = feature(
                "  Scenario Outline: Logins\n    Given the password is <state>\n    When the user submits the login form\n"
                "    Then <outcome>\n    Examples:\n      | state | outcome |\n      | correct | the dashboard is shown |\n"
                "      | not correct | an error message is shown |\n")
                .scenarios[0];
  auto rows = detail::expand_outline(sc);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].title, "Logins (example 2)");
  EXPECT_EQ(rows[1].steps[0].text, "the password is not correct");
}

TEST(Review, FtgoFixture) {
  auto doc = gherkin::parse_feature(read(FIXTURE_DIR "/ftgo/draft.feature"));
  auto g = ceg::parse_ceg(read(FIXTURE_DIR "/ftgo/cancel_order.ceg"));
  auto r = review::review(doc, g, nullptr, {});
  ASSERT_EQ(r.report.modified.size(), 2u);
  ASSERT_EQ(r.report.added.size(), 1u);
  EXPECT_TRUE(has_defect(r.report.modified[0], DefectKind::MissingPrecondition, "C2"));
  EXPECT_TRUE(has_defect(r.report.modified[1], DefectKind::MissingEffect, "E3"));
  EXPECT_EQ(r.report.added[0].assignment.at("C4"), true);
  std::string revised = gherkin::serialize(r.revised);
  EXPECT_TRUE(lint::lint(revised).empty());

  auto again = review::review(gherkin::parse_feature(revised), g, nullptr, {});
  EXPECT_TRUE(again.report.modified.empty());
  EXPECT_TRUE(again.report.added.empty());
  EXPECT_EQ(gherkin::serialize(again.revised), revised);

  auto j = to_json_value(r.report);
  EXPECT_EQ(j["modified"].size(), 2u);
  EXPECT_EQ(j["added"].size(), 1u);
}

TEST(Review, RewordingUsesTheOracleButKeepsBindings) {
  auto doc = gherkin::parse_feature(read(FIXTURE_DIR "/ftgo/draft.feature"));
  auto g = ceg::parse_ceg(read(FIXTURE_DIR "/ftgo/cancel_order.ceg"));
  int review_calls = 0;
  oracle::FunctionOracle o([&](const oracle::OracleRequest& r) -> std::string {
    if (r.agent == "Review") {
      ++review_calls;
      return R"({"steps": []})";  // no rewording offered
    }
    return R"({"atom": null})";
  });
  auto r = review::review(doc, g, &o, {});
  EXPECT_GT(review_calls, 0);
  EXPECT_EQ(r.report.modified.size(), 2u);
  EXPECT_EQ(r.report.added.size(), 1u);
}
