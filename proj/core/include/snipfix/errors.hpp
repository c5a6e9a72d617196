#pragma once

#include <stdexcept>
#include <string>

namespace snipfix {

/// Raised by the mini-js grammar on malformed input. Carries the 1-based
/// line of the first offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("parse error at line " + std::to_string(line) +
                           ": " + message),
        line_(line),
        message_(message) {}

  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

/// A reduction was requested for a report that is not present in the input.
class ReportAbsentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The external analyzer child misbehaved: bad exit, timeout, or a response
/// that does not follow the wire protocol.
class ExternalAnalyzerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// merge_back was handed a line mapping that no longer matches the original
/// file (reduced lines must equal their mapped original lines byte-for-byte).
class MappingMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A JSONL record failed schema validation. Carries the 1-based record line.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(int line, const std::string& message)
      : std::runtime_error("schema error at line " + std::to_string(line) +
                           ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Model-service transport failure after retries were exhausted.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model service responded 429 and the retry budget ran out.
class RateLimitedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// build_prompt was asked for few-shot examples but the train split has no
/// sample for the requested rule.
class NoShotsAvailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace snipfix
