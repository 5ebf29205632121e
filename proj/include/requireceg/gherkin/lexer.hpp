#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "requireceg/gherkin/ast.hpp"
#include "requireceg/text.hpp"

namespace requireceg::gherkin {

enum class LineType {
  Blank,
  Comment,
  Tags,
  Feature,
  Background,
  Scenario,
  ScenarioOutline,
  Examples,
  Rule,
  Step,
  TableRow,
  DocStringDelimiter,
  Other,
};

/// One physical source line with its syntactic role.
struct Line {
  LineType type = LineType::Blank;
  std::size_t number = 0;  // 1-based
  std::size_t indent = 0;
  std::string raw;   // without line terminator
  std::string rest;  // title / step text / delimiter suffix, trimmed
  StepKeyword step_keyword = StepKeyword::Given;

  std::size_t column() const noexcept { return indent + 1; }
  std::string_view trimmed() const noexcept { return text::trim_view(raw); }
};

namespace detail {

struct HeaderKeyword {
  std::string_view word;
  LineType type;
};

// Longer spellings first so "Scenario Outline:" is not read as "Scenario:".
inline constexpr HeaderKeyword kHeaders[] = {
    {"Feature:", LineType::Feature},
    {"Background:", LineType::Background},
    {"Scenario Outline:", LineType::ScenarioOutline},
    {"Scenario Template:", LineType::ScenarioOutline},
    {"Scenario:", LineType::Scenario},
    {"Examples:", LineType::Examples},
    {"Scenarios:", LineType::Examples},
    {"Example:", LineType::Scenario},
    {"Rule:", LineType::Rule},
};

struct StepWord {
  std::string_view word;
  StepKeyword keyword;
};

inline constexpr StepWord kStepWords[] = {
    {"Given", StepKeyword::Given}, {"When", StepKeyword::When}, {"Then", StepKeyword::Then},
    {"And", StepKeyword::And},     {"But", StepKeyword::But},
};

}  // namespace detail

inline Line classify_line(std::string_view raw, std::size_t number) {
  Line line;
  line.number = number;
  line.raw = std::string(raw);
  line.indent = text::indentation(raw);
  std::string_view t = text::trim_view(raw);

  if (t.empty()) {
    line.type = LineType::Blank;
    return line;
  }
  if (t.front() == '#') {
    line.type = LineType::Comment;
    line.rest = std::string(t);
    return line;
  }
  if (t.front() == '@') {
    line.type = LineType::Tags;
    line.rest = std::string(t);
    return line;
  }
  if (t.front() == '|') {
    line.type = LineType::TableRow;
    line.rest = std::string(t);
    return line;
  }
  if (t.starts_with("\"\"\"") || t.starts_with("```")) {
    line.type = LineType::DocStringDelimiter;
    line.rest = std::string(text::trim_view(t.substr(3)));
    return line;
  }
  for (const auto& h : detail::kHeaders) {
    if (t.starts_with(h.word)) {
      line.type = h.type;
      line.rest = text::trim(t.substr(h.word.size()));
      return line;
    }
  }
  for (const auto& s : detail::kStepWords) {
    if (t.starts_with(s.word) && (t.size() == s.word.size() || t[s.word.size()] == ' ' || t[s.word.size()] == '\t')) {
      line.type = LineType::Step;
      line.step_keyword = s.keyword;
      line.rest = text::trim(t.substr(s.word.size()));
      return line;
    }
  }
  line.type = LineType::Other;
  line.rest = std::string(t);
  return line;
}

inline std::vector<Line> tokenize_lines(std::string_view source) {
  std::vector<Line> out;
  auto raw = text::split_lines(source);
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back(classify_line(raw[i], i + 1));
  return out;
}

/// Splits a `| a | b |` row into unescaped, trimmed cells. Returns nullopt when
/// the row is not closed by a pipe.
inline std::optional<TableRow> split_table_row(std::string_view trimmed_row) {
  if (trimmed_row.size() < 2 || trimmed_row.front() != '|' || trimmed_row.back() != '|') return std::nullopt;
  // A trailing "\|" escapes the closing pipe, which leaves the row open.
  std::size_t backslashes = 0;
  for (std::size_t i = trimmed_row.size() - 1; i > 0 && trimmed_row[i - 1] == '\\'; --i) ++backslashes;
  if (backslashes % 2 == 1) return std::nullopt;

  TableRow cells;
  std::string cell;
  for (std::size_t i = 1; i < trimmed_row.size(); ++i) {
    char c = trimmed_row[i];
    if (c == '\\' && i + 1 < trimmed_row.size()) {
      char n = trimmed_row[i + 1];
      if (n == '|' || n == '\\') {
        cell += n;
        ++i;
        continue;
      }
      if (n == 'n') {
        cell += '\n';
        ++i;
        continue;
      }
    }
    if (c == '|') {
      cells.push_back(text::trim(cell));
      cell.clear();
      continue;
    }
    cell += c;
  }
  return cells;
}

inline std::string escape_table_cell(std::string_view cell) {
  std::string out;
  for (char c : cell) {
    if (c == '\\') out += "\\\\";
    else if (c == '|') out += "\\|";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

}  // namespace requireceg::gherkin
