#pragma once

#include <stdexcept>
#include <string>

namespace qmcts {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  domain = 3,     // argument outside the mathematical domain of an operation
  dimension = 4,  // size or grid mismatch between operands
  config = 2,     // malformed or inconsistent experiment configuration
  io = 5,         // filesystem / parse failure
  numeric = 6,    // non-finite values produced during a run
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
    case ErrorCategory::numeric: return "numeric";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) {
  throw Error(c, what);
}

}  // namespace qmcts
