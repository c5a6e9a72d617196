#include "snipfix/source_text.hpp"

#include <gtest/gtest.h>

#include "corpus.hpp"

namespace snipfix {
namespace {

TEST(SourceText, RoundTripsCommonShapes) {
  for (const char* raw : {"a\nb\n", "a\nb", "", "\n", "a\n\n", "x"}) {
    SourceText text = SourceText::from_bytes(raw);
    EXPECT_EQ(text.to_bytes(), raw) << "raw=" << raw;
  }
}

TEST(SourceText, NormalizesCrlfAndRemembersIt) {
  SourceText text = SourceText::from_bytes("a\r\nb\r\n");
  EXPECT_EQ(text.line_count(), 2);
  EXPECT_EQ(text.line(1), "a");
  EXPECT_EQ(text.text(), "a\nb");
  EXPECT_EQ(text.to_bytes(), "a\r\nb\r\n");
  EXPECT_EQ(text.line_ending(), LineEnding::CRLF);
}

TEST(SourceText, JoiningLinesReproducesText) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    SourceText text = testing::random_text_file(seed, 0, 30);
    std::string joined;
    for (int i = 1; i <= text.line_count(); ++i) {
      if (i > 1) joined.push_back('\n');
      joined += text.line(i);
    }
    EXPECT_EQ(joined, text.text());
  }
}

TEST(SourceText, EmptyInputHasZeroLines) {
  SourceText text = SourceText::from_bytes("");
  EXPECT_EQ(text.line_count(), 0);
  EXPECT_TRUE(text.empty());
}

TEST(SourceText, SubsetKeepsRequestedLines) {
  SourceText text = SourceText::from_bytes("a\nb\nc\nd\n");
  SourceText sub = text.subset({1, 3});
  EXPECT_EQ(sub.to_bytes(), "a\nc\n");
}

TEST(LineMapping, RejectsNonMonotonicPairs) {
  EXPECT_THROW(LineMapping({{1, 2}, {2, 2}}), std::invalid_argument);
  EXPECT_THROW(LineMapping({{2, 1}, {1, 2}}), std::invalid_argument);
  EXPECT_THROW(LineMapping({{0, 1}}), std::invalid_argument);
}

TEST(LineMapping, LooksUpBothDirections) {
  LineMapping mapping({{1, 1}, {2, 3}, {3, 7}, {4, 8}});
  EXPECT_EQ(mapping.original_of(2), 3);
  EXPECT_EQ(mapping.reduced_of(7), 3);
  EXPECT_FALSE(mapping.original_of(5).has_value());
  EXPECT_FALSE(mapping.reduced_of(2).has_value());
  EXPECT_TRUE(mapping.contains_original(8));
}

TEST(LineMapping, ComposeChainsReductions) {
  LineMapping inner({{1, 1}, {2, 3}, {3, 7}, {4, 8}});  // c1 -> C
  LineMapping outer({{1, 2}, {2, 4}});                  // c2 -> c1
  LineMapping composed = LineMapping::compose(outer, inner);
  EXPECT_EQ(composed.pairs(),
            (std::vector<std::pair<int, int>>{{1, 3}, {2, 8}}));
}

TEST(LineMapping, IdentityCoversAllLines) {
  LineMapping id = LineMapping::identity(3);
  EXPECT_EQ(id.size(), 3);
  EXPECT_EQ(id.original_of(2), 2);
}

}  // namespace
}  // namespace snipfix
