#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evolve {

enum class ErrorCode {
  syntax,
  unknown_identifier,
  dimension_mismatch,
  singular_matrix,
  domain,
  io,
  schema,
  time_domain,
  invalid_argument,
  instant_mismatch,
  not_remodeling,
  near_singular_process,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Location of a token or node inside expression source text.
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 1;
  int column = 1;

  bool operator==(const SourceSpan&) const = default;
};

/// Parse or typing failure, carrying the offending span.
class ExprError : public Error {
 public:
  ExprError(ErrorCode code, const std::string& message, SourceSpan span)
      : Error(code, format(message, span)), span_(span), bare_(message) {}

  const SourceSpan& span() const noexcept { return span_; }
  const std::string& bare_message() const noexcept { return bare_; }

 private:
  static std::string format(const std::string& message, const SourceSpan& span) {
    return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
  }

  SourceSpan span_;
  std::string bare_;
};

}  // namespace evolve
