/// @file requireceg.hpp
/// @brief Everything in one include.
#pragma once

#include "requireceg/errors.hpp"
#include "requireceg/text.hpp"

#include "requireceg/gherkin/ast.hpp"
#include "requireceg/gherkin/lexer.hpp"
#include "requireceg/gherkin/parser.hpp"
#include "requireceg/gherkin/stats.hpp"
#include "requireceg/gherkin/writer.hpp"
#include "requireceg/lint/lint.hpp"

#include "requireceg/ceg/analysis.hpp"
#include "requireceg/ceg/dsl.hpp"
#include "requireceg/ceg/evaluate.hpp"
#include "requireceg/ceg/formal_check.hpp"
#include "requireceg/ceg/graph.hpp"
#include "requireceg/ceg/syntax.hpp"

#include "requireceg/oracle/oracle.hpp"
#include "requireceg/oracle/profile.hpp"
#include "requireceg/oracle/prompts.hpp"

#include "requireceg/elicitation/agents.hpp"
#include "requireceg/elicitation/feature_tree.hpp"
#include "requireceg/intervention/heal.hpp"
#include "requireceg/intervention/questions.hpp"
#include "requireceg/review/review.hpp"

#include "requireceg/metrics/diversity.hpp"
#include "requireceg/metrics/readability.hpp"
#include "requireceg/metrics/report.hpp"

#include "requireceg/pipeline/config.hpp"
#include "requireceg/pipeline/reference.hpp"
#include "requireceg/pipeline/run.hpp"
