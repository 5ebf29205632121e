/// @file ast.hpp
/// @brief Value types for one parsed `.feature` file.
///
/// The tree mirrors the usual feature layout: a Feature header with an
/// optional "As a / I want / So that" narrative, an optional Background of
/// shared preconditions, and an ordered list of plain scenarios and outlines.
/// Tags and `#` comments ride along as metadata so that serialization keeps
/// them, but nothing downstream assigns them meaning.
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace requireceg::gherkin {

/// Where a node came from in its source file. Positions are metadata; they
/// never take part in structural equality, so a reparsed document compares
/// equal to the original even though the serializer moved lines around.
struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;

  friend constexpr bool operator==(const SourcePos&, const SourcePos&) noexcept { return true; }
};

enum class StepKeyword { Given, When, Then, And, But };

/// What a step means once And/But have been attached to the preceding
/// primary keyword.
enum class StepKind { Precondition, Trigger, Action };

using TableRow = std::vector<std::string>;

struct DocString {
  std::string delimiter = "\"\"\"";
  std::string media_type;
  std::string content;

  bool operator==(const DocString&) const = default;
};

struct Step {
  StepKeyword keyword = StepKeyword::Given;
  StepKind kind = StepKind::Precondition;
  std::string text;
  std::vector<TableRow> table;  // optional step data table
  std::optional<DocString> doc_string;
  std::vector<std::string> comments;
  SourcePos pos;

  bool operator==(const Step&) const = default;
};

struct ExamplesTable {
  std::string name;
  std::vector<std::string> tags;
  std::vector<std::string> comments;
  std::vector<std::string> headers;
  std::vector<TableRow> rows;
  SourcePos pos;

  bool operator==(const ExamplesTable&) const = default;
};

enum class ScenarioKind { Plain, Outline };

struct Scenario {
  std::string title;
  ScenarioKind kind = ScenarioKind::Plain;
  std::vector<std::string> description;
  std::vector<std::string> tags;
  std::vector<std::string> comments;
  std::vector<Step> steps;
  std::vector<ExamplesTable> examples;  // non-empty iff kind == Outline
  SourcePos pos;

  bool operator==(const Scenario&) const = default;
};

struct NarrativeBlock {
  std::string role;     // "As a <role>"
  std::string want;     // "I want <want>"
  std::string benefit;  // "So that <benefit>"

  bool operator==(const NarrativeBlock&) const = default;
};

struct Background {
  std::string title;
  std::vector<std::string> description;
  std::vector<std::string> comments;
  std::vector<Step> steps;
  SourcePos pos;

  bool operator==(const Background&) const = default;
};

struct GherkinDocument {
  std::string feature_title;
  std::optional<NarrativeBlock> narrative;
  std::vector<std::string> description;  // free text other than the narrative
  std::vector<std::string> tags;
  std::vector<std::string> comments;  // comments before the Feature line
  std::optional<Background> background;
  std::vector<Scenario> scenarios;
  std::vector<std::string> trailing_comments;
  std::optional<std::string> source_path;

  bool operator==(const GherkinDocument& other) const {
    // source_path is provenance, not structure.
    return feature_title == other.feature_title && narrative == other.narrative &&
           description == other.description && tags == other.tags && comments == other.comments &&
           background == other.background && scenarios == other.scenarios &&
           trailing_comments == other.trailing_comments;
  }
};

inline const char* keyword_name(StepKeyword k) noexcept {
  switch (k) {
    case StepKeyword::Given: return "Given";
    case StepKeyword::When: return "When";
    case StepKeyword::Then: return "Then";
    case StepKeyword::And: return "And";
    case StepKeyword::But: return "But";
  }
  return "Given";
}

inline const char* kind_name(StepKind k) noexcept {
  switch (k) {
    case StepKind::Precondition: return "Precondition";
    case StepKind::Trigger: return "Trigger";
    case StepKind::Action: return "Action";
  }
  return "Precondition";
}

inline StepKeyword primary_keyword(StepKind k) noexcept {
  switch (k) {
    case StepKind::Precondition: return StepKeyword::Given;
    case StepKind::Trigger: return StepKeyword::When;
    case StepKind::Action: return StepKeyword::Then;
  }
  return StepKeyword::Given;
}

inline bool is_conjunction(StepKeyword k) noexcept { return k == StepKeyword::And || k == StepKeyword::But; }

namespace detail {
inline void collect_placeholders(std::string_view s, std::vector<std::string>& out) {
  std::size_t pos = 0;
  while ((pos = s.find('<', pos)) != std::string_view::npos) {
    std::size_t close = s.find('>', pos + 1);
    if (close == std::string_view::npos) return;
    std::string_view name = s.substr(pos + 1, close - pos - 1);
    if (!name.empty() && name.find('<') == std::string_view::npos) {
      std::string n(name);
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
    }
    pos = close + 1;
  }
}
}  // namespace detail

/// Placeholder names (`<name>`) used in a step's text, table and doc string,
/// in order of first appearance.
inline std::vector<std::string> placeholders(const Step& step) {
  std::vector<std::string> out;
  detail::collect_placeholders(step.text, out);
  for (const auto& row : step.table)
    for (const auto& cell : row) detail::collect_placeholders(cell, out);
  if (step.doc_string) detail::collect_placeholders(step.doc_string->content, out);
  return out;
}

/// Rewrites keywords so every run of same-kind steps starts with its primary
/// keyword and continues with And (a But is left alone).
inline void normalize_keywords(std::vector<Step>& steps) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Step& s = steps[i];
    if (i == 0 || steps[i - 1].kind != s.kind) s.keyword = primary_keyword(s.kind);
    else if (s.keyword != StepKeyword::But) s.keyword = StepKeyword::And;
  }
}

}  // namespace requireceg::gherkin
