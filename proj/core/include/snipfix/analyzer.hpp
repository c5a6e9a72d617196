#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "snipfix/report.hpp"
#include "snipfix/source_text.hpp"
#include "snipfix/syntax.hpp"

namespace snipfix {

/// Configuration for creating an analyzer: either a builtin rule set or an
/// external child process speaking the line-JSON protocol.
struct AnalyzerHandle {
  enum class Kind { Builtin, External };
  Kind kind = Kind::Builtin;
  std::string ruleset = "all";  // builtin: "all" or comma-separated rule ids
  std::string command;          // external: command line, split on spaces
  std::chrono::milliseconds timeout{5000};
  int max_restarts = 1;
  // Grammar the reducer uses around this analyzer. Builtin checkers always
  // work on mini-js; external analyzers may prefer the braces fallback.
  GrammarId grammar = GrammarId::MiniJs;
};

/// Parse "builtin:<ruleset>" or "exec:<command ...>".
AnalyzerHandle parse_analyzer_spec(const std::string& spec);

/// Uniform analyzer interface. analyze() is deterministic for a fixed
/// implementation and input, returns reports sorted by (line, rule), and
/// bumps the per-session call counter that reduction experiments measure.
class Analyzer {
 public:
  virtual ~Analyzer() = default;

  std::vector<Report> analyze(const SourceText& code) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return run(code);
  }

  long long calls() const { return calls_.load(std::memory_order_relaxed); }

  /// Grammar the analyzer's findings refer to; used for parse checks when
  /// locating enclosing constructs.
  virtual GrammarId grammar() const { return GrammarId::MiniJs; }

 protected:
  virtual std::vector<Report> run(const SourceText& code) = 0;

 private:
  std::atomic<long long> calls_{0};
};

std::unique_ptr<Analyzer> make_analyzer(const AnalyzerHandle& handle);

/// True iff analyze(code) contains a report with target.rule whose line,
/// translated through `mapping`, lands on target.line.
bool report_exists(Analyzer& analyzer, const SourceText& code,
                   const Report& target, const LineMapping& mapping);

/// Candidates whose spans intersect target.provenance_lines. Without
/// provenance every candidate is returned, so the caller's bulk-removal
/// attempt degenerates to removing nothing.
std::vector<NodeId> approx_provenance_nodes(const SyntaxTree& tree,
                                            const std::vector<NodeId>& candidates,
                                            const Report& target);

/// True iff `prediction` parses and carries no target.rule report at the
/// position target.line maps to through the original->prediction diff. A
/// deleted report line falls back to the enclosing function's mapped span;
/// an ambiguously replaced line falls back to the whole file.
bool does_fix(Analyzer& analyzer, const SourceText& prediction,
              const SourceText& original, const Report& target);

/// True iff no rule has more reports in `prediction` than in `original`.
bool no_new_issues(Analyzer& analyzer, const SourceText& prediction,
                   const SourceText& original);

}  // namespace snipfix
