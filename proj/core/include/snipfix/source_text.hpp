#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace snipfix {

enum class LineEnding { LF, CRLF };

/// Source text held as a list of 1-based lines. The internal convention is
/// LF; the original line ending and trailing-newline state are recorded so
/// output boundaries can re-emit the exact input bytes.
class SourceText {
 public:
  SourceText() = default;

  /// Parse raw bytes. CRLF is normalized to LF on ingest; a single trailing
  /// newline is folded into the trailing_newline flag.
  static SourceText from_bytes(std::string_view raw);

  static SourceText from_lines(std::vector<std::string> lines,
                               LineEnding eol = LineEnding::LF,
                               bool trailing_newline = true);

  const std::vector<std::string>& lines() const { return lines_; }
  int line_count() const { return static_cast<int>(lines_.size()); }

  /// 1-based access. `number` must be in [1, line_count()].
  const std::string& line(int number) const { return lines_.at(number - 1); }

  bool empty() const { return lines_.empty(); }

  /// Lines joined with LF, no trailing newline. This is the canonical text.
  std::string text() const;

  /// Re-emit with the recorded line ending and trailing-newline state.
  std::string to_bytes() const;

  LineEnding line_ending() const { return eol_; }
  bool trailing_newline() const { return trailing_newline_; }

  /// Keep exactly the given 1-based lines (sorted ascending) of this text.
  SourceText subset(const std::vector<int>& kept_lines) const;

  bool operator==(const SourceText& other) const {
    return lines_ == other.lines_;
  }

 private:
  std::vector<std::string> lines_;
  LineEnding eol_ = LineEnding::LF;
  bool trailing_newline_ = true;
};

/// Strictly increasing one-to-one map from lines of a derived text to lines
/// of the text it came from. Pairs are (reduced_line, original_line), both
/// 1-based.
class LineMapping {
 public:
  LineMapping() = default;

  /// Validates strict monotonicity in both coordinates.
  explicit LineMapping(std::vector<std::pair<int, int>> pairs);

  static LineMapping identity(int line_count);

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  bool empty() const { return pairs_.empty(); }

  /// Original line for a reduced line, if mapped.
  std::optional<int> original_of(int reduced_line) const;

  /// Reduced line for an original line, if it survived.
  std::optional<int> reduced_of(int original_line) const;

  bool contains_original(int original_line) const {
    return reduced_of(original_line).has_value();
  }

  /// Compose two reduction steps: `outer` maps C2 -> C1, `inner` maps
  /// C1 -> C0; the result maps C2 -> C0.
  static LineMapping compose(const LineMapping& outer,
                             const LineMapping& inner);

  bool operator==(const LineMapping& other) const {
    return pairs_ == other.pairs_;
  }

 private:
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace snipfix
