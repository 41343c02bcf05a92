#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relboost {

enum class ErrorCategory {
  Parse,     // malformed input text
  Schema,    // predicate/arity/type violations
  Io,        // missing or unreadable files
  Config,    // invalid parameters
  Data,      // dataset cannot satisfy a request (e.g. too few negatives)
  Training,  // induction or boosting failure
  Metric,    // degenerate evaluation input
};

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

/// Parse failure carrying the 1-based line number of the offending input.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace relboost
