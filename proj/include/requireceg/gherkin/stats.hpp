#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "requireceg/errors.hpp"
#include "requireceg/gherkin/ast.hpp"
#include "requireceg/text.hpp"

namespace requireceg::gherkin {

/// Surface statistics over a set of feature files. Keyword counts are literal
/// tokens: an And under a Given is counted as And, not as Given. Background
/// steps are included.
struct KeywordStats {
  std::size_t f_num = 0;
  double avg_loc = 0.0;
  double f_sce = 0.0;  // mean scenarios per feature
  std::size_t key_given = 0;
  std::size_t key_when = 0;
  std::size_t key_then = 0;
  std::size_t key_and = 0;
  std::size_t key_but = 0;
  std::size_t key_examples = 0;
  std::size_t total_lines = 0;
  std::size_t total_scenarios = 0;
};

namespace detail {
inline void count_steps(const std::vector<Step>& steps, KeywordStats& s) {
  for (const auto& step : steps) {
    switch (step.keyword) {
      case StepKeyword::Given: ++s.key_given; break;
      case StepKeyword::When: ++s.key_when; break;
      case StepKeyword::Then: ++s.key_then; break;
      case StepKeyword::And: ++s.key_and; break;
      case StepKeyword::But: ++s.key_but; break;
    }
  }
}
}  // namespace detail

inline KeywordStats keyword_stats(const std::vector<GherkinDocument>& docs, const std::vector<std::string>& raw_sources) {
  if (docs.size() != raw_sources.size())
    throw PreconditionViolation("keyword_stats: " + std::to_string(docs.size()) + " documents but " +
                                std::to_string(raw_sources.size()) + " sources");
  KeywordStats s;
  s.f_num = docs.size();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const GherkinDocument& d = docs[i];
    s.total_lines += text::split_lines(raw_sources[i]).size();
    s.total_scenarios += d.scenarios.size();
    if (d.background) detail::count_steps(d.background->steps, s);
    for (const auto& sc : d.scenarios) {
      detail::count_steps(sc.steps, s);
      s.key_examples += sc.examples.size();
    }
  }
  if (s.f_num > 0) {
    s.avg_loc = static_cast<double>(s.total_lines) / static_cast<double>(s.f_num);
    s.f_sce = static_cast<double>(s.total_scenarios) / static_cast<double>(s.f_num);
  }
  return s;
}

}  // namespace requireceg::gherkin
