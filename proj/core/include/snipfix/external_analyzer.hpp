#pragma once

#include <memory>
#include <string>
#include <vector>

#include "snipfix/analyzer.hpp"

namespace snipfix {

/// Adapter for an external analyzer running as a persistent child process.
///
/// Wire protocol, one JSON object per line on stdin/stdout:
///   request:  {"v":1,"op":"analyze","code":"<string>"}
///   response: {"v":1,"reports":[{"rule":..,"category":..,"message":..,
///                                "line":..,"provenance_lines":[..]?}, ...]}
///   health:   {"v":1,"op":"ping"} -> {"v":1,"pong":true}
///
/// A malformed response or a timeout raises ExternalAnalyzerError; the child
/// is restarted up to handle.max_restarts times before giving up. The handle
/// owns one child and is not shareable across workers.
class ExternalAnalyzer : public Analyzer {
 public:
  explicit ExternalAnalyzer(AnalyzerHandle handle);
  ~ExternalAnalyzer() override;

  ExternalAnalyzer(const ExternalAnalyzer&) = delete;
  ExternalAnalyzer& operator=(const ExternalAnalyzer&) = delete;

  /// Health check; spawns the child if needed.
  bool ping();

  GrammarId grammar() const override { return handle_.grammar; }

 protected:
  std::vector<Report> run(const SourceText& code) override;

 private:
  struct Child;
  void ensure_child();
  void kill_child();
  std::string roundtrip(const std::string& request_line);

  AnalyzerHandle handle_;
  std::unique_ptr<Child> child_;
  int restarts_used_ = 0;
};

/// Split a command line on spaces (no quoting rules).
std::vector<std::string> split_command(const std::string& command);

}  // namespace snipfix
