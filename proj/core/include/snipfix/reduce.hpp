#pragma once

#include <functional>
#include <string>
#include <vector>

#include "snipfix/analyzer.hpp"
#include "snipfix/report.hpp"
#include "snipfix/source_text.hpp"
#include "snipfix/syntax.hpp"

namespace snipfix {

enum class ReductionMode { Provenance, VanillaHDD };

std::string mode_name(ReductionMode mode);

/// One removal attempt. `attempted` is the size of the victim node set;
/// `analyzer_called` is false when the candidate failed to parse and the
/// parse check short-circuited the analyzer.
struct TraceEntry {
  int level = 0;
  int attempted = 0;
  bool accepted = false;
  bool analyzer_called = false;

  bool operator==(const TraceEntry&) const = default;
};

struct ReductionConfig {
  ReductionMode mode = ReductionMode::Provenance;
  int max_fixpoint_iterations = 10;
  long long max_analyzer_calls = 2000;
};

/// Result of a reduction. analyzer_calls counts every analyze() invocation
/// made on behalf of this reduction, including the initial verification
/// (so it equals 1 + the number of trace entries with analyzer_called).
struct ReductionOutcome {
  SourceText reduced;
  LineMapping mapping;  // reduced line -> original file line
  long long analyzer_calls = 0;
  ReductionMode mode = ReductionMode::Provenance;
  std::vector<TraceEntry> trace;
  bool budget_exhausted = false;
  int fixpoint_passes = 0;
};

/// Invoked on every accepted intermediate state; used by tests to verify
/// that accepted states keep parsing and keep the report.
using AcceptObserver =
    std::function<void(const SourceText&, const LineMapping&)>;

/// Classic delta-debugging minimization over a node set: 2-partition start,
/// complement preference, granularity doubling on failure, deterministic
/// node order by (start_line, id). The test predicate is
/// parses(candidate) && report_exists(candidate, target, mapping).
struct DdminOutcome {
  SourceText code;
  SyntaxTree tree;
  LineMapping mapping;
  long long analyzer_calls = 0;
  std::vector<TraceEntry> trace;
  bool changed = false;
  bool budget_exhausted = false;
};

DdminOutcome ddmin(const std::vector<NodeId>& nodes, const Report& target,
                   const SourceText& code, const SyntaxTree& tree,
                   const LineMapping& mapping, Analyzer& analyzer,
                   long long max_analyzer_calls = 2000);

/// Level-by-level reduction: per level an optional provenance bulk-removal
/// attempt (one candidate, one analyzer call) followed by ddmin on the
/// surviving nodes, descending to the tree depth; the whole pass repeats
/// until a pass deletes nothing or the iteration cap is reached.
/// VanillaHDD mode skips the provenance attempt.
///
/// Throws ReportAbsentError when the target report is not present in (or the
/// code does not parse as) the input. A hit call budget flags the outcome
/// and returns the best state reached.
ReductionOutcome code_reduce(const SourceText& code, const Report& target,
                             Analyzer& analyzer, const ReductionConfig& cfg,
                             const AcceptObserver& observer = {});

/// Per-mode analyzer-call statistics over a corpus.
struct CallCountSample {
  std::string id;
  long long provenance_calls = 0;
  long long hdd_calls = 0;
  bool failed = false;
  std::string error;
};

struct CallCountSummary {
  double provenance_mean = 0;
  double provenance_geomean = 0;
  double hdd_mean = 0;
  double hdd_geomean = 0;
  double geomean_ratio = 0;  // provenance / vanilla-HDD
  int failed_samples = 0;
  std::vector<CallCountSample> samples;
};

CallCountSummary compare_call_counts(
    const std::vector<std::pair<SourceText, Report>>& corpus,
    Analyzer& analyzer, const ReductionConfig& base_cfg = {});

}  // namespace snipfix
