#pragma once

#include <vector>

#include "snipfix/source_text.hpp"

namespace snipfix {

/// A maximal run of non-matching lines between two texts. Ranges are 1-based
/// and inclusive; an empty side is encoded as first > last, with `first`
/// pointing at the line position just after the preceding context.
struct DiffHunk {
  int a_first = 0;
  int a_last = 0;
  int b_first = 0;
  int b_last = 0;

  bool a_empty() const { return a_first > a_last; }
  bool b_empty() const { return b_first > b_last; }
  bool operator==(const DiffHunk&) const = default;
};

/// Line diff of two texts built from a canonical longest common subsequence.
///
/// The LCS is made deterministic by a fixed backtrack rule: walking the DP
/// table from the end, equal lines are matched whenever they extend the LCS,
/// and on score ties the A-side line is consumed first. No move detection,
/// no heuristics.
struct LineDiff {
  std::vector<std::pair<int, int>> matches;  // (a_line, b_line), increasing
  std::vector<DiffHunk> hunks;               // gaps between matches, in order
};

LineDiff diff_lines(const SourceText& a, const SourceText& b);

/// Where an A-side line ended up on the B side.
enum class TrackKind {
  Matched,   // line survived unchanged; `line` is its B-side number
  Deleted,   // line sits in a hunk with an empty B side
  Replaced,  // line sits in a hunk with B-side lines [range_first, range_last]
};

struct TrackedLine {
  TrackKind kind = TrackKind::Matched;
  int line = 0;         // valid for Matched
  int range_first = 0;  // valid for Replaced
  int range_last = 0;
};

TrackedLine track_line(const LineDiff& diff, int a_line);

}  // namespace snipfix
