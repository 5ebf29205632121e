#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/errors.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/gherkin/lexer.hpp"
#include "requireceg/gherkin/parser.hpp"

namespace requireceg::lint {

enum class Severity { Error };

struct LintRule {
  std::string rule_id;
  Severity severity = Severity::Error;
  std::string description;
};

struct LintFinding {
  std::string rule_id;
  std::size_t line = 1;
  std::size_t column = 1;
  std::string message;

  bool operator==(const LintFinding&) const = default;
};

inline constexpr std::string_view kUnexpectedError = "unexpected-error";

/// Everything a rule may look at. `doc` is set only when the source parsed.
struct LintContext {
  std::string_view source;
  std::vector<gherkin::Line> lines;
  std::vector<bool> in_doc_string;  // true for delimiter and content lines
  std::optional<gherkin::GherkinDocument> doc;
  std::optional<ParseError> parse_error;
};

using RuleCheck = std::function<void(const LintContext&, std::vector<LintFinding>&)>;

class RuleRegistry {
 public:
  struct Entry {
    LintRule rule;
    RuleCheck check;
  };

  void add(LintRule rule, RuleCheck check) {
    for (const auto& e : entries_)
      if (e.rule.rule_id == rule.rule_id) throw InvariantViolation("duplicate lint rule id " + rule.rule_id);
    entries_.push_back({std::move(rule), std::move(check)});
  }

  bool contains(std::string_view id) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.rule.rule_id == id; });
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }

  std::vector<LintRule> rules() const {
    std::vector<LintRule> out;
    for (const auto& e : entries_) out.push_back(e.rule);
    return out;
  }

 private:
  std::vector<Entry> entries_;
};

namespace detail {

using gherkin::Line;
using gherkin::LineType;

inline bool is_scenario_header(LineType t) {
  return t == LineType::Scenario || t == LineType::ScenarioOutline || t == LineType::Background;
}

inline bool is_block_header(LineType t) {
  return is_scenario_header(t) || t == LineType::Feature || t == LineType::Examples || t == LineType::Rule;
}

inline void emit(std::vector<LintFinding>& out, std::string_view id, const Line& line, std::string message) {
  out.push_back({std::string(id), line.number, line.column(), std::move(message)});
}

/// Significant lines: everything outside doc strings except blanks and comments.
template <typename F>
void for_each_significant(const LintContext& ctx, F&& f) {
  for (std::size_t i = 0; i < ctx.lines.size(); ++i) {
    if (ctx.in_doc_string[i]) continue;
    LineType t = ctx.lines[i].type;
    if (t == LineType::Blank || t == LineType::Comment) continue;
    f(ctx.lines[i]);
  }
}

inline void check_multiline_steps(const LintContext& ctx, std::vector<LintFinding>& out) {
  bool after_step = false;
  for_each_significant(ctx, [&](const Line& l) {
    if (l.type == LineType::Step) after_step = true;
    else if (is_block_header(l.type) || l.type == LineType::Tags) after_step = false;
    else if (l.type == LineType::Other && after_step)
      emit(out, "no-multiline-steps", l, "step text continues on a separate line");
  });
}

inline void check_files_without_scenarios(const LintContext& ctx, std::vector<LintFinding>& out) {
  const Line* feature = nullptr;
  bool any = false;
  for_each_significant(ctx, [&](const Line& l) {
    if (l.type == LineType::Feature && !feature) feature = &l;
    if (l.type == LineType::Scenario || l.type == LineType::ScenarioOutline) any = true;
  });
  if (feature && !any) emit(out, "no-files-without-scenarios", *feature, "feature has no scenarios");
}

inline void check_missing_feature_header(const LintContext& ctx, std::vector<LintFinding>& out) {
  const Line* first = nullptr;
  for_each_significant(ctx, [&](const Line& l) {
    if (!first && l.type != LineType::Tags) first = &l;
  });
  if (!first) {
    out.push_back({"missing-feature-header", 1, 1, "file has no Feature header"});
  } else if (first->type != LineType::Feature) {
    emit(out, "missing-feature-header", *first, "file must start with a Feature header");
  }
}

inline void check_empty_scenario(const LintContext& ctx, std::vector<LintFinding>& out) {
  const Line* open = nullptr;
  bool has_step = false;
  auto close = [&] {
    if (open && !has_step)
      emit(out, "no-empty-scenario", *open, std::string(open->type == LineType::Background ? "Background" : "scenario") + " has no steps");
    open = nullptr;
  };
  for_each_significant(ctx, [&](const Line& l) {
    if (is_scenario_header(l.type) || l.type == LineType::Feature || l.type == LineType::Rule) {
      close();
      if (is_scenario_header(l.type)) {
        open = &l;
        has_step = false;
      }
    } else if (l.type == LineType::Step) {
      has_step = true;
    }
  });
  close();
}

inline void check_indentation(const LintContext& ctx, std::vector<LintFinding>& out) {
  std::optional<std::size_t> header_indent;
  std::optional<std::size_t> step_indent;
  for (std::size_t i = 0; i < ctx.lines.size(); ++i) {
    const Line& l = ctx.lines[i];
    if (l.type == LineType::Blank) continue;
    std::string_view lead = std::string_view(l.raw).substr(0, l.indent);
    if (!ctx.in_doc_string[i] && lead.find(' ') != std::string_view::npos && lead.find('\t') != std::string_view::npos) {
      emit(out, "indentation-consistency", l, "indentation mixes tabs and spaces");
      continue;
    }
    if (ctx.in_doc_string[i]) continue;
    if (is_scenario_header(l.type)) {
      if (!header_indent) header_indent = l.indent;
      else if (*header_indent != l.indent)
        emit(out, "indentation-consistency", l,
             "scenario header indented " + std::to_string(l.indent) + " instead of " + std::to_string(*header_indent));
      step_indent.reset();
    } else if (is_block_header(l.type)) {
      step_indent.reset();
    } else if (l.type == LineType::Step) {
      if (!step_indent) step_indent = l.indent;
      else if (*step_indent != l.indent)
        emit(out, "indentation-consistency", l,
             "step indented " + std::to_string(l.indent) + " instead of " + std::to_string(*step_indent));
    }
  }
}

inline void check_duplicate_names(const LintContext& ctx, std::vector<LintFinding>& out) {
  if (!ctx.doc) return;
  std::set<std::string> seen;
  for (const auto& sc : ctx.doc->scenarios) {
    std::string key = text::trim(sc.title);
    if (key.empty()) continue;
    if (!seen.insert(key).second)
      out.push_back({"no-duplicate-scenario-names", sc.pos.line, sc.pos.column, "scenario name '" + key + "' is used more than once"});
  }
}

inline void check_keyword_order(const LintContext& ctx, std::vector<LintFinding>& out) {
  if (!ctx.doc) return;
  using gherkin::StepKind;
  if (ctx.doc->background) {
    for (const auto& s : ctx.doc->background->steps) {
      if (s.kind != StepKind::Precondition) {
        out.push_back({"keyword-order", s.pos.line, s.pos.column, "Background may only contain Given steps"});
        break;
      }
    }
  }
  for (const auto& sc : ctx.doc->scenarios) {
    for (std::size_t i = 1; i < sc.steps.size(); ++i) {
      if (static_cast<int>(sc.steps[i].kind) < static_cast<int>(sc.steps[i - 1].kind)) {
        const auto& s = sc.steps[i];
        out.push_back({"keyword-order", s.pos.line, s.pos.column,
                       std::string(gherkin::keyword_name(gherkin::primary_keyword(s.kind))) + " step after " +
                           gherkin::keyword_name(gherkin::primary_keyword(sc.steps[i - 1].kind))});
        break;
      }
    }
  }
}

inline void check_and_without_antecedent(const LintContext& ctx, std::vector<LintFinding>& out) {
  bool have_primary = false;
  for_each_significant(ctx, [&](const Line& l) {
    if (is_block_header(l.type)) {
      have_primary = false;
    } else if (l.type == LineType::Step) {
      if (gherkin::is_conjunction(l.step_keyword) && !have_primary)
        emit(out, "and-without-antecedent", l,
             std::string(gherkin::keyword_name(l.step_keyword)) + " has no preceding Given, When or Then");
      else have_primary = true;
    }
  });
}

inline void check_outline_without_examples(const LintContext& ctx, std::vector<LintFinding>& out) {
  const Line* outline = nullptr;
  bool has_examples = false;
  auto close = [&] {
    if (outline && !has_examples) emit(out, "outline-without-examples", *outline, "Scenario Outline has no Examples");
    outline = nullptr;
  };
  for_each_significant(ctx, [&](const Line& l) {
    if (is_scenario_header(l.type) || l.type == LineType::Feature || l.type == LineType::Rule) {
      close();
      if (l.type == LineType::ScenarioOutline) {
        outline = &l;
        has_examples = false;
      }
    } else if (l.type == LineType::Examples) {
      has_examples = true;
    }
  });
  close();
}

inline void check_examples_columns(const LintContext& ctx, std::vector<LintFinding>& out) {
  bool in_examples = false;
  std::optional<std::size_t> width;
  for_each_significant(ctx, [&](const Line& l) {
    if (l.type == LineType::Examples) {
      in_examples = true;
      width.reset();
    } else if (is_block_header(l.type) || l.type == LineType::Step) {
      in_examples = false;
    } else if (l.type == LineType::TableRow && in_examples) {
      auto cells = gherkin::split_table_row(l.trimmed());
      if (!cells) {
        emit(out, "examples-column-mismatch", l, "malformed Examples row");
      } else if (!width) {
        width = cells->size();
      } else if (cells->size() != *width) {
        emit(out, "examples-column-mismatch", l,
             "row has " + std::to_string(cells->size()) + " cells, header has " + std::to_string(*width));
      }
    }
  });
}

inline void check_trailing_whitespace(const LintContext& ctx, std::vector<LintFinding>& out) {
  for (const auto& l : ctx.lines) {
    std::string_view raw = l.raw;
    std::string_view kept = text::rtrim_view(raw);
    if (kept.size() != raw.size())
      out.push_back({"no-trailing-whitespace", l.number, kept.size() + 1, "trailing whitespace"});
  }
}

inline void check_one_feature(const LintContext& ctx, std::vector<LintFinding>& out) {
  bool seen = false;
  for_each_significant(ctx, [&](const Line& l) {
    if (l.type != LineType::Feature) return;
    if (seen) emit(out, "one-feature-per-file", l, "second Feature in one file");
    seen = true;
  });
}

inline std::string_view rule_for(ParseError::Code code) {
  using C = ParseError::Code;
  switch (code) {
    case C::MultilineStep: return "no-multiline-steps";
    case C::MissingFeatureHeader: return "missing-feature-header";
    case C::OrphanConjunction: return "and-without-antecedent";
    case C::EmptyScenario: return "no-empty-scenario";
    case C::OutlineWithoutExamples: return "outline-without-examples";
    case C::MalformedTableRow:
    case C::TableColumnMismatch:
    case C::UndefinedPlaceholder: return "examples-column-mismatch";
    case C::DuplicateFeature: return "one-feature-per-file";
    default: return kUnexpectedError;
  }
}

inline LintContext make_context(std::string_view source) {
  LintContext ctx;
  ctx.source = source;
  ctx.lines = gherkin::tokenize_lines(source);
  ctx.in_doc_string.assign(ctx.lines.size(), false);
  std::optional<std::string> open;
  for (std::size_t i = 0; i < ctx.lines.size(); ++i) {
    const auto& l = ctx.lines[i];
    if (open) {
      ctx.in_doc_string[i] = true;
      if (l.trimmed() == *open) open.reset();
    } else if (l.type == LineType::DocStringDelimiter) {
      ctx.in_doc_string[i] = true;
      open = std::string(l.trimmed().substr(0, 3));
    }
  }
  try {
    ctx.doc = gherkin::parse_feature(source);
  } catch (const ParseError& e) {
    ctx.parse_error = e;
  }
  return ctx;
}

}  // namespace detail

/// The shipped rule set.
inline const RuleRegistry& default_registry() {
  static const RuleRegistry registry = [] {
    RuleRegistry r;
    auto add = [&](const char* id, const char* desc, RuleCheck fn) { r.add({id, Severity::Error, desc}, std::move(fn)); };
    add("no-multiline-steps", "a step's text must fit on one line", detail::check_multiline_steps);
    add("no-files-without-scenarios", "a feature must contain at least one scenario", detail::check_files_without_scenarios);
    add("missing-feature-header", "the file must open with a Feature header", detail::check_missing_feature_header);
    add("no-empty-scenario", "scenarios and backgrounds need at least one step", detail::check_empty_scenario);
    add("indentation-consistency", "steps and scenario headers are consistently indented", detail::check_indentation);
    add("no-duplicate-scenario-names", "scenario names are unique within a feature", detail::check_duplicate_names);
    add("keyword-order", "Given steps precede When steps, which precede Then steps", detail::check_keyword_order);
    add("and-without-antecedent", "And/But must follow a Given, When or Then", detail::check_and_without_antecedent);
    add("outline-without-examples", "every Scenario Outline has an Examples block", detail::check_outline_without_examples);
    add("examples-column-mismatch", "Examples rows match their header", detail::check_examples_columns);
    add("no-trailing-whitespace", "lines do not end in whitespace", detail::check_trailing_whitespace);
    add("one-feature-per-file", "a file declares exactly one Feature", detail::check_one_feature);
    return r;
  }();
  return registry;
}

/// Findings sorted by (line, column, rule id), at most one per rule and line.
/// Parse failures always surface as a finding, so lint never throws on bad input.
inline std::vector<LintFinding> lint(std::string_view source, const RuleRegistry& registry = default_registry()) {
  LintContext ctx = detail::make_context(source);
  std::vector<LintFinding> raw;
  for (const auto& e : registry.entries()) e.check(ctx, raw);
  if (ctx.parse_error) {
    const ParseError& pe = *ctx.parse_error;
    std::string_view id = detail::rule_for(pe.code());
    if (!registry.contains(id)) id = kUnexpectedError;
    raw.push_back({std::string(id), pe.line(), pe.column(), pe.detail()});
  }
  std::sort(raw.begin(), raw.end(), [](const LintFinding& a, const LintFinding& b) {
    return std::tie(a.line, a.column, a.rule_id) < std::tie(b.line, b.column, b.rule_id);
  });
  std::vector<LintFinding> out;
  std::set<std::pair<std::string, std::size_t>> seen;
  for (auto& f : raw)
    if (seen.insert({f.rule_id, f.line}).second) out.push_back(std::move(f));
  return out;
}

struct SyntaxAccuracy {
  std::size_t total_files = 0;
  std::size_t clean_files = 0;
  double value = 0.0;
};

inline SyntaxAccuracy acc_syn(const std::vector<std::string>& sources) {
  if (sources.empty()) throw EmptyCorpus();
  SyntaxAccuracy a;
  a.total_files = sources.size();
  for (const auto& s : sources)
    if (lint(s).empty()) ++a.clean_files;
  a.value = static_cast<double>(a.clean_files) / static_cast<double>(a.total_files);
  return a;
}

inline void to_json(nlohmann::json& j, const LintFinding& f) {
  j = nlohmann::json{{"rule_id", f.rule_id}, {"line", f.line}, {"column", f.column}, {"message", f.message}};
}

inline void to_json(nlohmann::json& j, const SyntaxAccuracy& a) {
  j = nlohmann::json{{"total_files", a.total_files}, {"clean_files", a.clean_files}, {"value", a.value}};
}

inline std::string format_text(const std::string& path, const std::vector<LintFinding>& findings) {
  std::string out;
  for (const auto& f : findings)
    out += path + ":" + std::to_string(f.line) + ":" + std::to_string(f.column) + ": " + f.rule_id + ": " + f.message + "\n";
  return out;
}

}  // namespace requireceg::lint
