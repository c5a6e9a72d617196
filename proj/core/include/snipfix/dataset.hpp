#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "snipfix/analyzer.hpp"
#include "snipfix/diff.hpp"
#include "snipfix/reduce.hpp"
#include "snipfix/report.hpp"
#include "snipfix/source_text.hpp"

namespace snipfix {

enum class Flavor { FullOriginal, CodeReduced, Window3, LongContext };
enum class Split { Train, Test };
enum class LicenseClass { Permissive, Restrictive };

std::string flavor_name(Flavor f);
Flavor flavor_from_name(const std::string& name);
std::string split_name(Split s);
std::string license_class_name(LicenseClass c);
LicenseClass license_class_from_name(const std::string& name);

/// Restrictively licensed code is reserved for testing.
inline Split split_for(LicenseClass c) {
  return c == LicenseClass::Restrictive ? Split::Test : Split::Train;
}

/// One dataset record in one flavor. `line` is in this flavor's pre
/// coordinates; `mapping` (reduced line -> original line) is only present
/// for CodeReduced.
struct FixSample {
  std::string id;
  std::string repo;
  LicenseClass license_class = LicenseClass::Permissive;
  Split split = Split::Train;
  std::string rule;
  RuleCategory category = RuleCategory::AST;
  std::string message;
  int line = 0;
  Flavor flavor = Flavor::FullOriginal;
  SourceText pre;
  SourceText post;
  std::optional<LineMapping> mapping;
};

// ---------------------------------------------------------------------------
// candidate mining
// ---------------------------------------------------------------------------

struct CandidateEvidence {
  TrackKind tracking = TrackKind::Matched;
  int post_line = 0;                   // Matched: tracked location in post
  int post_first = 0, post_last = 0;   // Replaced: ambiguous landing range
  bool ambiguous = false;
};

struct Candidate {
  Report report;  // as raised on the pre file
  CandidateEvidence evidence;
};

/// Reports present in `pre` that have no same-rule match at the location
/// tracked through the pre->post diff.
std::vector<Candidate> mine_candidates(const SourceText& pre,
                                       const SourceText& post,
                                       Analyzer& analyzer);

// ---------------------------------------------------------------------------
// reduced pair construction
// ---------------------------------------------------------------------------

enum class RejectReason { PostUnparseable, ReportSurvives, NoOverlappingHunks };
std::string reject_reason_name(RejectReason r);

struct ReducedPair {
  SourceText reduced_pre;   // c
  SourceText reduced_post;  // c'
  LineMapping mapping;      // c -> C
  SourceText relevant_post;  // C with only the fix-relevant hunks applied
  std::vector<DiffHunk> kept_hunks;  // fix-relevant hunks, C coordinates
  ReductionOutcome reduction;
};

struct BuildPairResult {
  std::optional<ReducedPair> pair;
  std::optional<RejectReason> reject;
};

/// Reduce `pre` for `target`, then project the pre->post diff onto the
/// reduced code: a hunk survives only when its pre-side lines are mapped
/// into the reduced code or sit at distance 1 from a mapped line. The
/// result must parse and must no longer raise the target report.
BuildPairResult build_reduced_pair(const SourceText& pre,
                                   const SourceText& post,
                                   const Report& target, Analyzer& analyzer,
                                   const ReductionConfig& cfg);

// ---------------------------------------------------------------------------
// window flavors
// ---------------------------------------------------------------------------

struct WindowResult {
  SourceText window;
  LineMapping mapping;  // window line -> original line
};

/// Lines [max(1, line-radius) .. min(len, line+radius)].
WindowResult extract_window(const SourceText& code, int line, int radius);

// ---------------------------------------------------------------------------
// flavor pipeline
// ---------------------------------------------------------------------------

/// Input manifest entry: one labeled (pre, post) file pair.
struct PairRecord {
  std::string id;
  std::string repo;
  LicenseClass license_class = LicenseClass::Permissive;
  SourceText pre;
  SourceText post;
};

struct FlavorOptions {
  std::set<Flavor> flavors = {Flavor::FullOriginal, Flavor::CodeReduced,
                              Flavor::Window3, Flavor::LongContext};
  ReductionConfig reduction;
  int window_radius = 3;
  int long_context_radius = 50;
};

struct FlavorOutcome {
  std::vector<FixSample> samples;
  struct Skip {
    std::string id;
    std::string reason;
  };
  std::vector<Skip> skipped;
};

/// Mine candidates from the pair and emit the requested flavors for each.
FlavorOutcome build_flavors(const PairRecord& record, Analyzer& analyzer,
                            const FlavorOptions& options);

// ---------------------------------------------------------------------------
// JSONL import/export
// ---------------------------------------------------------------------------

/// One JSON object per line:
/// {"id","repo","license_class","split","rule","category","message","line",
///  "flavor","pre","post","mapping":[[r,o],...]|null}
/// Deterministic field order, UTF-8, LF separated. When `revalidate` is
/// given, CodeReduced samples are checked against their invariants before
/// writing. Import throws SchemaError with the offending line number.
std::string export_jsonl_string(const std::vector<FixSample>& samples,
                                Analyzer* revalidate = nullptr);
void export_jsonl(const std::vector<FixSample>& samples,
                  const std::string& path, Analyzer* revalidate = nullptr);
std::vector<FixSample> import_jsonl_string(const std::string& payload);
std::vector<FixSample> import_jsonl(const std::string& path);

std::vector<PairRecord> import_pairs_jsonl(const std::string& path);

}  // namespace snipfix
