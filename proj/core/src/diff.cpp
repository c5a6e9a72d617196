#include "snipfix/diff.hpp"

#include <algorithm>
#include <stdexcept>

namespace snipfix {

LineDiff diff_lines(const SourceText& a, const SourceText& b) {
  const auto& la = a.lines();
  const auto& lb = b.lines();
  const int n = static_cast<int>(la.size());
  const int m = static_cast<int>(lb.size());

  // dp[i][j] = LCS length of la[i:], lb[j:].
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (int i = n - 1; i >= 0; --i) {
    for (int j = m - 1; j >= 0; --j) {
      if (la[i] == lb[j]) {
        dp[i][j] = dp[i + 1][j + 1] + 1;
      } else {
        dp[i][j] = std::max(dp[i + 1][j], dp[i][j + 1]);
      }
    }
  }

  LineDiff out;
  int i = 0, j = 0;
  auto flush_hunk = [&](int a_from, int a_to, int b_from, int b_to) {
    // inclusive 1-based; empty side encoded as first > last
    if (a_from > a_to && b_from > b_to) return;
    out.hunks.push_back(DiffHunk{a_from, a_to, b_from, b_to});
  };
  int last_a = 0, last_b = 0;  // last matched line on each side
  while (i < n && j < m) {
    if (la[i] == lb[j] && dp[i][j] == dp[i + 1][j + 1] + 1) {
      flush_hunk(last_a + 1, i, last_b + 1, j);
      out.matches.emplace_back(i + 1, j + 1);
      last_a = i + 1;
      last_b = j + 1;
      ++i;
      ++j;
    } else if (dp[i + 1][j] >= dp[i][j + 1]) {
      ++i;  // tie-break: consume the A side first
    } else {
      ++j;
    }
  }
  flush_hunk(last_a + 1, n, last_b + 1, m);
  return out;
}

TrackedLine track_line(const LineDiff& diff, int a_line) {
  for (const auto& [ma, mb] : diff.matches) {
    if (ma == a_line) return TrackedLine{TrackKind::Matched, mb, 0, 0};
  }
  for (const auto& h : diff.hunks) {
    if (!h.a_empty() && a_line >= h.a_first && a_line <= h.a_last) {
      if (h.b_empty()) return TrackedLine{TrackKind::Deleted, 0, 0, 0};
      return TrackedLine{TrackKind::Replaced, 0, h.b_first, h.b_last};
    }
  }
  throw std::out_of_range("track_line: line not in diff domain");
}

}  // namespace snipfix
