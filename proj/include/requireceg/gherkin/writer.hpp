#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "requireceg/errors.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/gherkin/lexer.hpp"
#include "requireceg/text.hpp"

namespace requireceg::gherkin {

namespace detail {

class Writer {
 public:
  std::string write(const GherkinDocument& doc) {
    validate(doc);
    emit_lines(doc.comments, 0);
    emit_tags(doc.tags, 0);
    line(0, "Feature: " + doc.feature_title);
    if (doc.narrative) {
      const NarrativeBlock& n = *doc.narrative;
      line(2, "Narrative:");
      line(2, std::string(starts_with_vowel(n.role) ? "As an " : "As a ") + n.role);
      line(2, "I want " + n.want);
      line(2, "So that " + n.benefit);
    }
    emit_lines(doc.description, 2);

    if (doc.background) {
      const Background& bg = *doc.background;
      blank();
      emit_lines(bg.comments, 2);
      line(2, header("Background:", bg.title));
      emit_lines(bg.description, 4);
      for (const auto& s : bg.steps) emit_step(s);
    }
    for (const auto& sc : doc.scenarios) {
      blank();
      emit_scenario(sc);
    }
    if (!doc.trailing_comments.empty()) {
      blank();
      emit_lines(doc.trailing_comments, 0);
    }
    return std::move(out_);
  }

  std::string write_scenario(const Scenario& sc) {
    validate_scenario(sc);
    emit_scenario(sc);
    return std::move(out_);
  }

 private:
  static bool starts_with_vowel(const std::string& s) {
    if (s.empty()) return false;
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s.front())));
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  }

  static std::string header(const std::string& keyword, const std::string& title) {
    return title.empty() ? keyword : keyword + " " + title;
  }

  static void validate_scenario(const Scenario& sc) {
    if (sc.steps.empty()) throw InvariantViolation("scenario '" + sc.title + "' has no steps");
    if (sc.kind == ScenarioKind::Outline && sc.examples.empty())
      throw InvariantViolation("Scenario Outline '" + sc.title + "' has no Examples");
    if (sc.kind == ScenarioKind::Plain && !sc.examples.empty())
      throw InvariantViolation("plain scenario '" + sc.title + "' carries an Examples table");
    for (const auto& ex : sc.examples)
      for (const auto& row : ex.rows)
        if (row.size() != ex.headers.size()) throw InvariantViolation("Examples row width differs from its header");
  }

  static void validate(const GherkinDocument& doc) {
    if (text::trim_view(doc.feature_title).empty()) throw InvariantViolation("feature title is empty");
    if (doc.scenarios.empty()) throw InvariantViolation("feature '" + doc.feature_title + "' has no scenarios");
    if (doc.background && doc.background->steps.empty()) throw InvariantViolation("Background has no steps");
    for (const auto& sc : doc.scenarios) validate_scenario(sc);
  }

  void line(std::size_t indent, const std::string& content) {
    out_.append(indent, ' ');
    out_ += content;
    out_ += '\n';
  }

  void blank() { out_ += '\n'; }

  void emit_lines(const std::vector<std::string>& lines, std::size_t indent) {
    for (const auto& l : lines) line(indent, l);
  }

  void emit_tags(const std::vector<std::string>& tags, std::size_t indent) {
    if (!tags.empty()) line(indent, text::join(tags, " "));
  }

  void emit_scenario(const Scenario& sc) {
    emit_lines(sc.comments, 2);
    emit_tags(sc.tags, 2);
    line(2, header(sc.kind == ScenarioKind::Outline ? "Scenario Outline:" : "Scenario:", sc.title));
    emit_lines(sc.description, 4);
    for (const auto& s : sc.steps) emit_step(s);
    for (const auto& ex : sc.examples) {
      blank();
      emit_lines(ex.comments, 4);
      emit_tags(ex.tags, 4);
      line(4, header("Examples:", ex.name));
      std::vector<TableRow> rows;
      rows.push_back(ex.headers);
      rows.insert(rows.end(), ex.rows.begin(), ex.rows.end());
      emit_table(rows, 6);
    }
  }

  void emit_step(const Step& s) {
    emit_lines(s.comments, 4);
    line(4, std::string(keyword_name(s.keyword)) + " " + s.text);
    emit_table(s.table, 6);
    if (s.doc_string) {
      const DocString& ds = *s.doc_string;
      line(6, ds.media_type.empty() ? ds.delimiter : ds.delimiter + ds.media_type);
      for (const auto& l : text::split(ds.content, '\n')) {
        if (l.empty()) blank();
        else line(6, l);
      }
      line(6, ds.delimiter);
    }
  }

  void emit_table(const std::vector<TableRow>& rows, std::size_t indent) {
    if (rows.empty()) return;
    std::vector<std::size_t> width;
    std::vector<std::vector<std::string>> escaped;
    for (const auto& row : rows) {
      std::vector<std::string> cells;
      for (std::size_t c = 0; c < row.size(); ++c) {
        cells.push_back(escape_table_cell(row[c]));
        if (width.size() <= c) width.push_back(0);
        width[c] = std::max(width[c], cells.back().size());
      }
      escaped.push_back(std::move(cells));
    }
    for (const auto& cells : escaped) {
      std::string l = "|";
      for (std::size_t c = 0; c < cells.size(); ++c) {
        l += ' ';
        l += cells[c];
        l.append(width[c] - cells[c].size(), ' ');
        l += " |";
      }
      line(indent, l);
    }
  }

  std::string out_;
};

}  // namespace detail

/// Normalized text: two spaces per nesting level, canonical keywords, LF
/// endings, aligned tables. Throws InvariantViolation for a document that
/// would not reparse (no scenarios, empty scenario, outline without Examples).
inline std::string serialize(const GherkinDocument& doc) { return detail::Writer().write(doc); }

/// One scenario block at its in-document indentation.
inline std::string serialize_scenario(const Scenario& sc) { return detail::Writer().write_scenario(sc); }

}  // namespace requireceg::gherkin
