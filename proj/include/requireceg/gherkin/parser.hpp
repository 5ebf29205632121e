#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "requireceg/errors.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/gherkin/lexer.hpp"
#include "requireceg/text.hpp"

namespace requireceg::gherkin {

namespace detail {

inline bool istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

/// Pulls an "As a / I want / So that" triple (optionally introduced by a
/// "Narrative:" line) out of free description text. The three lines must
/// appear in that order; anything else stays in the description.
inline std::optional<NarrativeBlock> extract_narrative(std::vector<std::string>& description) {
  auto find_from = [&](std::size_t start, auto pred) -> std::optional<std::size_t> {
    for (std::size_t i = start; i < description.size(); ++i)
      if (pred(description[i])) return i;
    return std::nullopt;
  };
  auto role_at = find_from(0, [](const std::string& l) { return istarts_with(l, "As a ") || istarts_with(l, "As an "); });
  if (!role_at) return std::nullopt;
  auto want_at = find_from(*role_at + 1, [](const std::string& l) { return istarts_with(l, "I want "); });
  if (!want_at) return std::nullopt;
  auto benefit_at = find_from(*want_at + 1, [](const std::string& l) { return istarts_with(l, "So that "); });
  if (!benefit_at) return std::nullopt;

  NarrativeBlock block;
  const std::string& role_line = description[*role_at];
  block.role = text::trim(role_line.substr(istarts_with(role_line, "As an ") ? 6 : 5));
  block.want = text::trim(description[*want_at].substr(7));
  block.benefit = text::trim(description[*benefit_at].substr(8));
  if (block.role.empty() || block.want.empty() || block.benefit.empty()) return std::nullopt;

  std::vector<std::size_t> drop{*role_at, *want_at, *benefit_at};
  if (auto header = find_from(0, [](const std::string& l) { return text::to_lower(l) == "narrative:"; });
      header && *header < *role_at)
    drop.push_back(*header);
  std::sort(drop.rbegin(), drop.rend());
  for (std::size_t i : drop) description.erase(description.begin() + static_cast<std::ptrdiff_t>(i));
  return block;
}

class Parser {
 public:
  explicit Parser(std::string_view source) : lines_(tokenize_lines(source)) {}

  GherkinDocument run() {
    for (i_ = 0; i_ < lines_.size(); ++i_) consume(lines_[i_]);
    close_block();
    finish_feature_description();
    if (!seen_feature_) {
      std::size_t at = lines_.empty() ? 1 : lines_.size();
      throw ParseError(ParseError::Code::MissingFeatureHeader, at, 1, "missing Feature header");
    }
    if (!pending_tags_.empty())
      throw ParseError(ParseError::Code::UnexpectedLine, pending_tags_line_, 1, "tags are not followed by a scenario");
    doc_.trailing_comments = std::move(pending_comments_);
    return std::move(doc_);
  }

 private:
  enum class State { BeforeFeature, FeatureDescription, Background, Scenario, Examples };

  [[noreturn]] void fail(ParseError::Code code, const Line& line, const std::string& message) const {
    throw ParseError(code, line.number, line.column(), message);
  }

  void consume(const Line& line) {
    switch (line.type) {
      case LineType::Blank: return;
      case LineType::Comment: pending_comments_.push_back(std::string(line.trimmed())); return;
      case LineType::Tags: on_tags(line); return;
      case LineType::Feature: on_feature(line); return;
      case LineType::Background: on_background(line); return;
      case LineType::Scenario:
      case LineType::ScenarioOutline: on_scenario(line); return;
      case LineType::Examples: on_examples(line); return;
      case LineType::Rule: fail(ParseError::Code::UnsupportedKeyword, line, "the Rule keyword is not supported");
      case LineType::Step: on_step(line); return;
      case LineType::TableRow: on_table_row(line); return;
      case LineType::DocStringDelimiter: on_doc_string(line); return;
      case LineType::Other: on_other(line); return;
    }
  }

  void require_feature(const Line& line) {
    if (state_ == State::BeforeFeature)
      fail(ParseError::Code::MissingFeatureHeader, line, "missing Feature header before '" + std::string(line.trimmed()) + "'");
  }

  void on_tags(const Line& line) {
    for (const auto& tok : text::split_whitespace(line.rest)) {
      if (tok.front() == '#') break;
      if (tok.front() != '@' || tok.size() == 1) fail(ParseError::Code::UnexpectedLine, line, "malformed tag '" + tok + "'");
      pending_tags_.push_back(tok);
    }
    if (pending_tags_line_ == 0) pending_tags_line_ = line.number;
  }

  std::vector<std::string> take_tags() {
    pending_tags_line_ = 0;
    return std::exchange(pending_tags_, {});
  }
  std::vector<std::string> take_comments() { return std::exchange(pending_comments_, {}); }

  void reject_tags(const Line& line) {
    if (!pending_tags_.empty()) fail(ParseError::Code::UnexpectedLine, line, "tags must precede a Feature, Scenario or Examples");
  }

  void on_feature(const Line& line) {
    if (seen_feature_) fail(ParseError::Code::DuplicateFeature, line, "a file may declare only one Feature");
    if (line.rest.empty()) fail(ParseError::Code::EmptyFeatureTitle, line, "Feature title is empty");
    seen_feature_ = true;
    doc_.feature_title = line.rest;
    doc_.tags = take_tags();
    doc_.comments = take_comments();
    state_ = State::FeatureDescription;
  }

  void on_background(const Line& line) {
    require_feature(line);
    reject_tags(line);
    if (doc_.background || !doc_.scenarios.empty())
      fail(ParseError::Code::UnexpectedLine, line, "Background must appear once, before any scenario");
    close_block();
    finish_feature_description();
    Background bg;
    bg.title = line.rest;
    bg.comments = take_comments();
    bg.pos = {line.number, line.column()};
    doc_.background = std::move(bg);
    state_ = State::Background;
    reset_block();
  }

  void on_scenario(const Line& line) {
    require_feature(line);
    close_block();
    finish_feature_description();
    Scenario sc;
    sc.title = line.rest;
    sc.kind = line.type == LineType::ScenarioOutline ? ScenarioKind::Outline : ScenarioKind::Plain;
    sc.tags = take_tags();
    sc.comments = take_comments();
    sc.pos = {line.number, line.column()};
    doc_.scenarios.push_back(std::move(sc));
    state_ = State::Scenario;
    reset_block();
  }

  void on_examples(const Line& line) {
    require_feature(line);
    if (doc_.scenarios.empty() || doc_.scenarios.back().kind != ScenarioKind::Outline ||
        (state_ != State::Scenario && state_ != State::Examples))
      fail(ParseError::Code::ExamplesOutsideOutline, line, "Examples may only follow a Scenario Outline");
    if (state_ == State::Examples) close_examples();
    ExamplesTable ex;
    ex.name = line.rest;
    ex.tags = take_tags();
    ex.comments = take_comments();
    ex.pos = {line.number, line.column()};
    doc_.scenarios.back().examples.push_back(std::move(ex));
    state_ = State::Examples;
    last_was_step_material_ = false;
  }

  std::vector<Step>* current_steps() {
    if (state_ == State::Background) return &doc_.background->steps;
    if (state_ == State::Scenario) return &doc_.scenarios.back().steps;
    return nullptr;
  }

  void on_step(const Line& line) {
    require_feature(line);
    reject_tags(line);
    if (state_ == State::Examples) fail(ParseError::Code::UnexpectedLine, line, "steps cannot follow an Examples block");
    std::vector<Step>* steps = current_steps();
    if (!steps) fail(ParseError::Code::StepOutsideScenario, line, "step appears before any Scenario or Background");
    if (line.rest.empty()) fail(ParseError::Code::EmptyStepText, line, "step has no text");

    Step step;
    step.keyword = line.step_keyword;
    step.text = line.rest;
    step.pos = {line.number, line.column()};
    step.comments = take_comments();
    switch (line.step_keyword) {
      case StepKeyword::Given: step.kind = StepKind::Precondition; break;
      case StepKeyword::When: step.kind = StepKind::Trigger; break;
      case StepKeyword::Then: step.kind = StepKind::Action; break;
      case StepKeyword::And:
      case StepKeyword::But:
        if (!last_primary_)
          fail(ParseError::Code::OrphanConjunction, line,
               std::string(keyword_name(line.step_keyword)) + " has no preceding Given, When or Then");
        step.kind = *last_primary_;
        break;
    }
    last_primary_ = step.kind;
    steps->push_back(std::move(step));
    last_was_step_material_ = true;
  }

  void on_table_row(const Line& line) {
    require_feature(line);
    auto cells = split_table_row(line.trimmed());
    if (!cells) fail(ParseError::Code::MalformedTableRow, line, "table row must start and end with '|'");

    if (state_ == State::Examples) {
      ExamplesTable& ex = doc_.scenarios.back().examples.back();
      if (ex.headers.empty()) {
        ex.headers = std::move(*cells);
      } else {
        if (cells->size() != ex.headers.size())
          fail(ParseError::Code::TableColumnMismatch, line,
               "row has " + std::to_string(cells->size()) + " cells but the header has " + std::to_string(ex.headers.size()));
        ex.rows.push_back(std::move(*cells));
      }
      return;
    }
    std::vector<Step>* steps = current_steps();
    if (!steps || steps->empty() || !last_was_step_material_ || steps->back().doc_string)
      fail(ParseError::Code::UnexpectedLine, line, "table row does not belong to a step");
    Step& step = steps->back();
    if (!step.table.empty() && cells->size() != step.table.front().size())
      fail(ParseError::Code::TableColumnMismatch, line,
           "row has " + std::to_string(cells->size()) + " cells but the first row has " + std::to_string(step.table.front().size()));
    step.table.push_back(std::move(*cells));
  }

  void on_doc_string(const Line& line) {
    require_feature(line);
    std::vector<Step>* steps = current_steps();
    if (!steps || steps->empty() || !last_was_step_material_ || steps->back().doc_string || !steps->back().table.empty())
      fail(ParseError::Code::UnexpectedLine, line, "doc string does not belong to a step");

    DocString ds;
    std::string_view t = line.trimmed();
    ds.delimiter = std::string(t.substr(0, 3));
    ds.media_type = line.rest;
    std::vector<std::string> content;
    for (++i_; i_ < lines_.size(); ++i_) {
      const Line& l = lines_[i_];
      if (text::trim_view(l.raw) == ds.delimiter) {
        ds.content = text::join(content, "\n");
        steps->back().doc_string = std::move(ds);
        return;
      }
      std::string_view raw = l.raw;
      std::size_t strip = std::min(line.indent, text::indentation(raw));
      content.emplace_back(raw.substr(strip));
    }
    fail(ParseError::Code::UnterminatedDocString, line, "doc string is never closed");
  }

  void on_other(const Line& line) {
    require_feature(line);
    switch (state_) {
      case State::FeatureDescription: doc_.description.push_back(line.rest); return;
      case State::Background:
      case State::Scenario: {
        std::vector<Step>* steps = current_steps();
        if (!steps->empty())
          fail(ParseError::Code::MultilineStep, line, "step text continues on a second line");
        auto& desc = state_ == State::Background ? doc_.background->description : doc_.scenarios.back().description;
        desc.push_back(line.rest);
        return;
      }
      case State::Examples:
        fail(ParseError::Code::UnexpectedLine, line, "unexpected text in an Examples block");
      case State::BeforeFeature: break;
    }
  }

  void reset_block() {
    last_primary_.reset();
    last_was_step_material_ = false;
  }

  void finish_feature_description() {
    if (narrative_done_ || !seen_feature_) return;
    narrative_done_ = true;
    doc_.narrative = extract_narrative(doc_.description);
  }

  void close_examples() {
    const Scenario& sc = doc_.scenarios.back();
    const ExamplesTable& ex = sc.examples.back();
    if (ex.headers.empty())
      throw ParseError(ParseError::Code::MalformedTableRow, ex.pos.line, ex.pos.column, "Examples block has no header row");
    for (const auto& step : sc.steps) {
      for (const auto& name : placeholders(step)) {
        if (std::find(ex.headers.begin(), ex.headers.end(), name) == ex.headers.end())
          throw ParseError(ParseError::Code::UndefinedPlaceholder, step.pos.line, step.pos.column,
                           "placeholder <" + name + "> has no Examples column");
      }
    }
  }

  void close_block() {
    if (state_ == State::Background) {
      const Background& bg = *doc_.background;
      if (bg.steps.empty())
        throw ParseError(ParseError::Code::EmptyScenario, bg.pos.line, bg.pos.column, "Background has no steps");
    } else if (state_ == State::Scenario || state_ == State::Examples) {
      if (state_ == State::Examples) close_examples();
      const Scenario& sc = doc_.scenarios.back();
      if (sc.steps.empty())
        throw ParseError(ParseError::Code::EmptyScenario, sc.pos.line, sc.pos.column, "scenario '" + sc.title + "' has no steps");
      if (sc.kind == ScenarioKind::Outline && sc.examples.empty())
        throw ParseError(ParseError::Code::OutlineWithoutExamples, sc.pos.line, sc.pos.column,
                         "Scenario Outline '" + sc.title + "' has no Examples");
    }
  }

  std::vector<Line> lines_;
  std::size_t i_ = 0;
  GherkinDocument doc_;
  State state_ = State::BeforeFeature;
  bool seen_feature_ = false;
  bool narrative_done_ = false;
  std::vector<std::string> pending_tags_;
  std::size_t pending_tags_line_ = 0;
  std::vector<std::string> pending_comments_;
  std::optional<StepKind> last_primary_;
  bool last_was_step_material_ = false;
};

}  // namespace detail

/// Parses one `.feature` file. Accepts LF or CRLF line endings and English
/// keywords only. Throws ParseError at the first grammar violation.
inline GherkinDocument parse_feature(std::string_view source, std::optional<std::string> source_path = std::nullopt) {
  GherkinDocument doc = detail::Parser(source).run();
  doc.source_path = std::move(source_path);
  return doc;
}

}  // namespace requireceg::gherkin
