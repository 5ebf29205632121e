#include <gtest/gtest.h>

#include "requireceg/oracle/mock.hpp"
#include "requireceg/oracle/oracle.hpp"
#include "requireceg/oracle/profile.hpp"
#include "requireceg/oracle/prompts.hpp"

using namespace requireceg;
using namespace requireceg::oracle;

TEST(Prompts, EveryAgentHasATemplate) {
  for (const char* agent : {"FeatureTreeGenerator", "AnalyzeUserBehavior", "AnalyzeSystemBehavior", "IdentifyCAndE",
                            "BuildCEG", "ReconstructCEG", "ReasoningIQ", "ModifyCEG", "GenerateGherkin", "Review",
                            "BindStep", "ClassifyFURPS"})
    EXPECT_FALSE(prompt_template(agent).empty()) << agent;
  EXPECT_THROW(prompt_template("NoSuchAgent"), PreconditionViolation);
}

TEST(Prompts, RenderSubstitutesAndRejectsMissingVars) {
  EXPECT_EQ(render_template("a {{x}} b {{y}}", {{"x", "1"}, {"y", "2"}}), "a 1 b 2");
  EXPECT_THROW(render_template("a {{x}}", {}), PreconditionViolation);
  EXPECT_THROW(render_template("a {{x", {{"x", "1"}}), PreconditionViolation);
  std::string p = render("ClassifyFURPS", {{"title", "Export invoices"}, {"feedback", ""}});
  EXPECT_NE(p.find("Feature: Export invoices"), std::string::npos);
}

TEST(ExtractJson, PlainFencedAndBroken) {
  EXPECT_EQ(extract_json(R"({"a": 1})")["a"], 1);
  EXPECT_EQ(extract_json("```json\n{\"a\": 2}\n```")["a"], 2);
  EXPECT_EQ(extract_json("```\n{\"a\": 3}\n```")["a"], 3);
  EXPECT_THROW(extract_json("   "), OracleFailure);
  EXPECT_THROW(extract_json("not json"), OracleFailure);
  EXPECT_THROW(extract_json("[1, 2]"), OracleFailure);
  EXPECT_THROW(extract_json("```json\n{}\n```\n```json\n{}\n```"), OracleFailure);
}

TEST(ExtractJson, FailureReasons) {
  try {
    extract_json("");
    FAIL();
  } catch (const OracleFailure& e) {
    EXPECT_EQ(e.reason(), OracleFailure::Reason::Empty);
  }
  try {
    extract_json("{oops");
    FAIL();
  } catch (const OracleFailure& e) {
    EXPECT_EQ(e.reason(), OracleFailure::Reason::Malformed);
  }
}

TEST(FixtureOracle, FirstMatchingRuleWins) {
  FixtureOracle o;
  o.add(rule_from_json({{"agent", "A"}, {"when_contains", {"apple"}}, {"unless_contains", {"pear"}}, {"answer", "one"}}, "t"));
  o.add(rule_from_json({{"agent", "A"}, {"answer", "two"}}, "t"));
  EXPECT_EQ(o.complete({"A", "an apple", {}}), "one");
  EXPECT_EQ(o.complete({"A", "an apple and a pear", {}}), "two");
  EXPECT_EQ(o.complete({"A", "nothing", {}}), "two");
  EXPECT_THROW(o.complete({"B", "x", {}}), OracleFailure);
}

TEST(FixtureOracle, ObjectAnswersAndScriptedFailures) {
  FixtureOracle o;
  o.add(rule_from_json({{"agent", "A"}, {"answer", {{"k", "v"}}}}, "t"));
  o.add(rule_from_json({{"agent", "B"}, {"fail", "timeout"}}, "t"));
  EXPECT_EQ(extract_json(o.complete({"A", "", {}}))["k"], "v");
  try {
    o.complete({"B", "", {}});
    FAIL();
  } catch (const OracleFailure& e) {
    EXPECT_EQ(e.reason(), OracleFailure::Reason::Timeout);
  }
}

TEST(FixtureOracle, LoadsDirectoryInFileOrder) {
  auto o = FixtureOracle::from_directory(FIXTURE_DIR "/pipeline/mock");
  ASSERT_FALSE(o.rules().empty());
  EXPECT_EQ(o.rules().front().origin, "a_time_travel.json");
  EXPECT_EQ(o.rules().back().origin, "z_defaults.json");
  EXPECT_THROW(FixtureOracle::from_directory(FIXTURE_DIR "/nope"), ConfigError);
}

TEST(Retries, TransportFailuresAreRetriedSchemaProblemsAreNot) {
  int calls = 0;
  FunctionOracle flaky([&](const OracleRequest&) -> std::string {
    if (++calls < 3) throw OracleFailure(OracleFailure::Reason::Transport, "down");
    return "{}";
  });
  EXPECT_EQ(complete_with_retries(flaky, {"A", "", {}}), "{}");
  EXPECT_EQ(calls, 3);

  calls = 0;
  FunctionOracle dead([&](const OracleRequest&) -> std::string {
    ++calls;
    throw OracleFailure(OracleFailure::Reason::Transport, "down");
  });
  EXPECT_THROW(complete_with_retries(dead, {"A", "", {}}), OracleFailure);
  EXPECT_EQ(calls, 3);

  calls = 0;
  FunctionOracle bad([&](const OracleRequest&) -> std::string {
    ++calls;
    return "nonsense";
  });
  EXPECT_THROW(ask_json(bad, {"A", "", {}}), OracleFailure);
  EXPECT_EQ(calls, 1);
}

TEST(Profile, MockProfileResolvesFixtureDir) {
  auto p = load_profile(FIXTURE_DIR "/pipeline/profile.json");
  EXPECT_EQ(p.provider, "mock");
  EXPECT_EQ(p.fixture_dir.filename(), "mock");
  auto o = make_oracle(p);
  EXPECT_EQ(o->config().temperature, 0.0);
  EXPECT_THROW(profile_from_json({{"provider", "carrier-pigeon"}}), ConfigError);
  EXPECT_THROW(profile_from_json({{"provider", "http"}}), ConfigError);
  EXPECT_THROW(profile_from_json({{"provider", "mock"}}), ConfigError);
}
