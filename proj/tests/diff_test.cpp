#include "snipfix/diff.hpp"

#include <gtest/gtest.h>

#include "corpus.hpp"
#include "oracles.hpp"

namespace snipfix {
namespace {

SourceText text_of(std::initializer_list<const char*> lines) {
  std::vector<std::string> v(lines.begin(), lines.end());
  return SourceText::from_lines(std::move(v));
}

TEST(Diff, IdenticalTextsMatchEverywhere) {
  SourceText a = text_of({"x", "y", "z"});
  LineDiff d = diff_lines(a, a);
  ASSERT_EQ(d.matches.size(), 3u);
  EXPECT_TRUE(d.hunks.empty());
}

TEST(Diff, PureInsertionBecomesOneHunk) {
  SourceText a = text_of({"one", "two"});
  SourceText b = text_of({"one", "mid", "two"});
  LineDiff d = diff_lines(a, b);
  ASSERT_EQ(d.hunks.size(), 1u);
  const DiffHunk& h = d.hunks[0];
  EXPECT_TRUE(h.a_empty());
  EXPECT_EQ(h.a_first, 2);
  EXPECT_EQ(h.b_first, 2);
  EXPECT_EQ(h.b_last, 2);
}

TEST(Diff, ReplacementHunkCoversBothSides) {
  SourceText a = text_of({"keep", "old", "tail"});
  SourceText b = text_of({"keep", "new1", "new2", "tail"});
  LineDiff d = diff_lines(a, b);
  ASSERT_EQ(d.hunks.size(), 1u);
  EXPECT_EQ(d.hunks[0].a_first, 2);
  EXPECT_EQ(d.hunks[0].a_last, 2);
  EXPECT_EQ(d.hunks[0].b_first, 2);
  EXPECT_EQ(d.hunks[0].b_last, 3);
}

TEST(Diff, RandomEditsAgreeWithReferenceLcs) {
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    SourceText a = testing::random_text_file(seed, 0, 40);
    SourceText b = testing::apply_random_edits(a, seed * 31 + 7, 8);
    LineDiff d = diff_lines(a, b);

    auto expected_matches = testing::lcs_matches_oracle(a.lines(), b.lines());
    EXPECT_EQ(d.matches, expected_matches) << "seed=" << seed;

    // Hunks must be exactly the gaps between consecutive matches.
    std::vector<DiffHunk> expected_hunks;
    int last_a = 0, last_b = 0;
    auto flush = [&](int na, int nb) {
      if (last_a + 1 <= na - 1 || last_b + 1 <= nb - 1) {
        expected_hunks.push_back(
            DiffHunk{last_a + 1, na - 1, last_b + 1, nb - 1});
      }
    };
    for (const auto& [ma, mb] : expected_matches) {
      flush(ma, mb);
      last_a = ma;
      last_b = mb;
    }
    flush(a.line_count() + 1, b.line_count() + 1);
    EXPECT_EQ(d.hunks, expected_hunks) << "seed=" << seed;
  }
}

TEST(Diff, TrackLineReportsMatchDeleteReplace) {
  SourceText a = text_of({"alpha", "beta", "gamma", "delta"});
  SourceText b = text_of({"alpha", "GAMMA?", "delta"});
  LineDiff d = diff_lines(a, b);

  TrackedLine kept = track_line(d, 1);
  EXPECT_EQ(kept.kind, TrackKind::Matched);
  EXPECT_EQ(kept.line, 1);

  TrackedLine replaced = track_line(d, 2);
  EXPECT_EQ(replaced.kind, TrackKind::Replaced);
  EXPECT_EQ(replaced.range_first, 2);
  EXPECT_EQ(replaced.range_last, 2);

  SourceText c = text_of({"alpha", "delta"});
  LineDiff d2 = diff_lines(a, c);
  EXPECT_EQ(track_line(d2, 2).kind, TrackKind::Deleted);
  EXPECT_EQ(track_line(d2, 3).kind, TrackKind::Deleted);
  EXPECT_THROW(track_line(d2, 9), std::out_of_range);
}

}  // namespace
}  // namespace snipfix
