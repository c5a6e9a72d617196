#pragma once

// Deterministic fixture generators and independent oracles for the test
// suites. All randomness goes through the seeded Rng below so fixtures are
// identical across runs and platforms.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "snipfix/report.hpp"
#include "snipfix/source_text.hpp"

namespace snipfix::testing {

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next() {
    // xorshift64*; stable everywhere, unlike std distributions
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
  }
  int below(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
  bool chance(int percent) { return below(100) < percent; }

 private:
  uint64_t state_;
};

// ---------------------------------------------------------------------------
// taint fixtures
// ---------------------------------------------------------------------------

struct TaintFixture {
  SourceText code;
  int sink_line = 0;            // where the PT report is expected
  std::set<int> essential_lines;  // lines whose deletion must kill the report
  bool direct = false;          // single-function flow (string-oracle friendly)
};

struct TaintFixtureOptions {
  int filler_functions = 4;   // junk functions around the flow
  int filler_statements = 2;  // junk statements inside each
  bool through_helper = true; // route the flow through a helper function
  bool sanitized = false;     // plant the basename sanitizer (no report)
};

TaintFixture make_taint_fixture(uint64_t seed, const TaintFixtureOptions& opts);

/// Fixture where at least `filler_percent` of lines are report-irrelevant.
TaintFixture make_padded_taint_fixture(uint64_t seed, int filler_percent);

/// Line-text def-use chase for the direct-flow fixture shape: tracks
/// variables assigned from req./request. expressions through textual
/// assignment chains into fs.* call arguments. Independent of the AST
/// analyzer.
std::vector<int> string_taint_oracle(const SourceText& code);

// ---------------------------------------------------------------------------
// per-category fixtures
// ---------------------------------------------------------------------------

struct CategoryFixture {
  SourceText code;
  std::string rule;
  RuleCategory category = RuleCategory::AST;
  int line = 0;
};

/// Small (<= 30 lines) file raising exactly one report of the category.
CategoryFixture make_category_fixture(RuleCategory category, uint64_t seed);

// ---------------------------------------------------------------------------
// generic text and brace files
// ---------------------------------------------------------------------------

SourceText random_text_file(uint64_t seed, int min_lines, int max_lines);

/// Balanced randomly nested brace file (no strings or comments).
SourceText random_brace_file(uint64_t seed, int lines);

/// Node count a braces-grammar tree must have for `code`: one root, one
/// chunk per multi-line brace pair, one leaf per plain non-blank line.
/// Stack-based scan, independent of the parser.
int brace_node_count_oracle(const SourceText& code);

/// Random line-level edit script (insert/delete/replace) applied to `base`.
SourceText apply_random_edits(const SourceText& base, uint64_t seed,
                              int max_edits);

/// Valid mini-js file built from a tiny statement pool; used where tests
/// need many parseable inputs.
SourceText random_minijs_file(uint64_t seed, int statements);

}  // namespace snipfix::testing
