#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace requireceg {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (non-leaf feature node, empty input text...).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// A value would violate its type invariants (e.g. serializing a feature with no scenarios).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty") {}
};

class EmptyText : public Error {
 public:
  EmptyText() : Error("text is empty") {}
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("input list is empty") {}
};

/// Gherkin syntax error. `code` identifies the violated grammar rule so the
/// linter can map it onto a rule id.
class ParseError : public Error {
 public:
  enum class Code {
    MissingFeatureHeader,
    EmptyFeatureTitle,
    DuplicateFeature,
    StepOutsideScenario,
    OrphanConjunction,
    EmptyStepText,
    MalformedTableRow,
    TableColumnMismatch,
    MultilineStep,
    EmptyScenario,
    OutlineWithoutExamples,
    ExamplesOutsideOutline,
    UndefinedPlaceholder,
    UnterminatedDocString,
    UnsupportedKeyword,
    UnexpectedLine,
  };

  ParseError(Code code, std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        code_(code),
        line_(line),
        column_(column),
        detail_(message) {}

  Code code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Code code_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// Lexical or structural error in CEG DSL text.
class DslSyntaxError : public Error {
 public:
  DslSyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

class IncompleteAssignment : public Error {
 public:
  explicit IncompleteAssignment(const std::string& condition)
      : Error("assignment has no value for condition " + condition), condition_(condition) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

class TooManyConditions : public Error {
 public:
  TooManyConditions(std::size_t count, std::size_t cap)
      : Error(std::to_string(count) + " conditions exceed the enumeration cap of " + std::to_string(cap)),
        count_(count),
        cap_(cap) {}
  std::size_t count() const noexcept { return count_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t count_;
  std::size_t cap_;
};

/// The text-generation backend failed: transport, timeout, or an answer that
/// does not match the agent's schema.
class OracleFailure : public Error {
 public:
  enum class Reason { Transport, Timeout, Malformed, Empty, NoFixture };

  OracleFailure(Reason reason, const std::string& message)
      : Error(std::string(reason_name(reason)) + ": " + message), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

  static const char* reason_name(Reason r) noexcept {
    switch (r) {
      case Reason::Transport: return "transport";
      case Reason::Timeout: return "timeout";
      case Reason::Malformed: return "malformed answer";
      case Reason::Empty: return "empty answer";
      case Reason::NoFixture: return "no fixture";
    }
    return "unknown";
  }

 private:
  Reason reason_;
};

/// An oracle answer parsed but failed domain validation after the allowed reprompt.
class ValidationFailure : public Error {
 public:
  enum class Stage { FeatureTree, Atoms, Draft };

  ValidationFailure(Stage stage, const std::string& message)
      : Error(std::string(stage_name(stage)) + ": " + message), stage_(stage) {}

  Stage stage() const noexcept { return stage_; }

  static const char* stage_name(Stage s) noexcept {
    switch (s) {
      case Stage::FeatureTree: return "feature tree validation failed";
      case Stage::Atoms: return "atom validation failed";
      case Stage::Draft: return "draft parse failed";
    }
    return "validation failed";
  }

 private:
  Stage stage_;
};

class FormalLoopExhausted : public Error {
 public:
  FormalLoopExhausted(std::size_t iterations, std::size_t residual)
      : Error("formal errors persist after " + std::to_string(iterations) + " iterations (" +
              std::to_string(residual) + " remaining)") {}
};

class LabelFileMissing : public Error {
 public:
  explicit LabelFileMissing(const std::string& path) : Error("label file not found: " + path) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace requireceg
