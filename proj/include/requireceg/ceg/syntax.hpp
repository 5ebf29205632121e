#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "requireceg/ceg/graph.hpp"
#include "requireceg/errors.hpp"
#include "requireceg/text.hpp"

namespace requireceg::ceg {

/// Untyped parse of one statement: `NAME` or `NAME(arg, ...)`, nested.
struct SyntaxNode {
  std::string name;
  bool is_call = false;
  std::vector<SyntaxNode> args;
  std::size_t column = 1;
};

struct StatementSyntax {
  std::string text;
  std::size_t line = 1;
  SyntaxNode lhs;
  std::optional<std::string> rhs;  // text after '='
  std::size_t rhs_column = 0;
};

namespace detail {

inline bool is_ident_char(char c) noexcept {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class StatementParser {
 public:
  StatementParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  StatementSyntax run() {
    StatementSyntax st;
    st.text = text::trim(s_);
    st.line = line_;
    skip_ws();
    if (pos_ >= s_.size()) fail("empty statement");
    st.lhs = expr(0);
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '=') {
      ++pos_;
      skip_ws();
      st.rhs_column = pos_ + 1;
      std::string id = ident();
      if (id.empty()) fail("expected a node id after '='");
      st.rhs = std::move(id);
      skip_ws();
    }
    if (pos_ < s_.size()) {
      if (s_[pos_] == ')') fail("unbalanced parenthesis: unexpected ')'");
      if (s_[pos_] == '=') fail("more than one '='");
      fail(std::string("unexpected character '") + s_[pos_] + "'");
    }
    return st;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw DslSyntaxError(line_, pos_ + 1, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && text::is_space(s_[pos_])) ++pos_;
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  SyntaxNode expr(int depth) {
    if (depth > 64) fail("expression nested too deeply");
    skip_ws();
    SyntaxNode n;
    n.column = pos_ + 1;
    n.name = ident();
    if (n.name.empty()) {
      if (pos_ >= s_.size()) fail("unexpected end of statement");
      if (s_[pos_] == ')') fail("unbalanced parenthesis: unexpected ')'");
      fail(std::string("unexpected character '") + s_[pos_] + "'");
    }
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      n.is_call = true;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ')') {
        ++pos_;
        return n;
      }
      for (;;) {
        n.args.push_back(expr(depth + 1));
        skip_ws();
        if (pos_ >= s_.size()) fail("unbalanced parenthesis: missing ')'");
        if (s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail(std::string("unexpected character '") + s_[pos_] + "'");
      }
    }
    return n;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Throws DslSyntaxError on lexical or bracket errors. Says nothing about
/// whether the operators and operands make sense.
inline StatementSyntax parse_statement(std::string_view text, std::size_t line = 1) {
  return detail::StatementParser(text, line).run();
}

struct DslLine {
  std::size_t line = 1;
  std::string text;
};

/// Declarations and statement lines of a DSL document, comments removed.
struct DslDocument {
  std::vector<AtomicNode> nodes;
  std::vector<DslLine> statements;
};

inline constexpr std::string_view kTriggerMarker = "[trigger]";

/// Parses `C1: description` (optionally `C1: [trigger] description`).
/// Returns nullopt when the line is not a declaration.
inline std::optional<AtomicNode> parse_declaration(std::string_view line_text, std::size_t line = 1) {
  std::string_view t = text::trim_view(line_text);
  std::size_t colon = t.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  std::string_view id = text::trim_view(t.substr(0, colon));
  for (char c : id)
    if (!detail::is_ident_char(c)) return std::nullopt;
  if (!is_node_id(id)) throw DslSyntaxError(line, 1, "'" + std::string(id) + "' is not a node id (expected C... or E...)");
  AtomicNode n;
  n.id = std::string(id);
  n.kind = kind_of_id(id);
  std::string_view desc = text::trim_view(t.substr(colon + 1));
  if (desc.starts_with(kTriggerMarker)) {
    n.trigger = true;
    desc = text::trim_view(desc.substr(kTriggerMarker.size()));
  }
  if (desc.empty()) throw DslSyntaxError(line, colon + 2, "declaration of " + n.id + " has no description");
  n.description = std::string(desc);
  return n;
}

inline DslDocument split_dsl(std::string_view source) {
  DslDocument doc;
  auto lines = text::split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view l = text::trim_view(lines[i]);
    if (l.empty() || l.front() == '#') continue;
    if (auto node = parse_declaration(l, i + 1)) {
      for (const auto& n : doc.nodes)
        if (n.id == node->id) throw DslSyntaxError(i + 1, 1, node->id + " is declared twice");
      doc.nodes.push_back(std::move(*node));
      continue;
    }
    std::size_t hash = l.find('#');
    if (hash != std::string_view::npos) l = text::trim_view(l.substr(0, hash));
    doc.statements.push_back({i + 1, std::string(l)});
  }
  return doc;
}

}  // namespace requireceg::ceg
