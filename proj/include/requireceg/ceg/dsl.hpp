#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "requireceg/ceg/formal_check.hpp"
#include "requireceg/ceg/graph.hpp"
#include "requireceg/ceg/syntax.hpp"

namespace requireceg::ceg {

/// Parses DSL text into a graph. Malformed text (bad brackets, stray
/// characters, bad declarations) throws DslSyntaxError. Statements that parse
/// but break the operator rules stay in `graph.rejected` for check_formal.
inline AssembleResult parse_ceg_detailed(std::string_view source) {
  DslDocument doc = split_dsl(source);
  std::vector<std::string> texts;
  for (const auto& s : doc.statements) {
    parse_statement(s.text, s.line);
    texts.push_back(s.text);
  }
  return assemble(doc.nodes, texts);
}

inline CausalEffectGraph parse_ceg(std::string_view source) { return parse_ceg_detailed(source).graph; }

}  // namespace requireceg::ceg
