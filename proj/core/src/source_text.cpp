#include "snipfix/source_text.hpp"

#include <algorithm>
#include <stdexcept>

namespace snipfix {

SourceText SourceText::from_bytes(std::string_view raw) {
  SourceText out;
  out.eol_ = raw.find("\r\n") != std::string_view::npos ? LineEnding::CRLF
                                                        : LineEnding::LF;
  std::string normalized;
  normalized.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') continue;
    normalized.push_back(raw[i]);
  }

  if (!normalized.empty() && normalized.back() == '\n') {
    out.trailing_newline_ = true;
    normalized.pop_back();
  } else {
    out.trailing_newline_ = false;
  }

  if (normalized.empty() && !out.trailing_newline_) {
    return out;  // truly empty input: zero lines
  }
  size_t start = 0;
  while (true) {
    size_t pos = normalized.find('\n', start);
    if (pos == std::string::npos) {
      out.lines_.push_back(normalized.substr(start));
      break;
    }
    out.lines_.push_back(normalized.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

SourceText SourceText::from_lines(std::vector<std::string> lines,
                                  LineEnding eol, bool trailing_newline) {
  SourceText out;
  out.lines_ = std::move(lines);
  out.eol_ = eol;
  out.trailing_newline_ = trailing_newline;
  return out;
}

std::string SourceText::text() const {
  std::string out;
  for (size_t i = 0; i < lines_.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines_[i];
  }
  return out;
}

std::string SourceText::to_bytes() const {
  const char* sep = eol_ == LineEnding::CRLF ? "\r\n" : "\n";
  std::string out;
  for (size_t i = 0; i < lines_.size(); ++i) {
    if (i) out += sep;
    out += lines_[i];
  }
  if (trailing_newline_ && !lines_.empty()) out += sep;
  return out;
}

SourceText SourceText::subset(const std::vector<int>& kept_lines) const {
  SourceText out;
  out.eol_ = eol_;
  out.trailing_newline_ = trailing_newline_;
  out.lines_.reserve(kept_lines.size());
  for (int n : kept_lines) out.lines_.push_back(line(n));
  return out;
}

LineMapping::LineMapping(std::vector<std::pair<int, int>> pairs)
    : pairs_(std::move(pairs)) {
  for (size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].first < 1 || pairs_[i].second < 1) {
      throw std::invalid_argument("line mapping entries must be 1-based");
    }
    if (i > 0 && (pairs_[i].first <= pairs_[i - 1].first ||
                  pairs_[i].second <= pairs_[i - 1].second)) {
      throw std::invalid_argument(
          "line mapping must be strictly increasing in both coordinates");
    }
  }
}

LineMapping LineMapping::identity(int line_count) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(std::max(line_count, 0)));
  for (int i = 1; i <= line_count; ++i) pairs.emplace_back(i, i);
  return LineMapping(std::move(pairs));
}

std::optional<int> LineMapping::original_of(int reduced_line) const {
  auto it = std::lower_bound(
      pairs_.begin(), pairs_.end(), reduced_line,
      [](const std::pair<int, int>& p, int v) { return p.first < v; });
  if (it == pairs_.end() || it->first != reduced_line) return std::nullopt;
  return it->second;
}

std::optional<int> LineMapping::reduced_of(int original_line) const {
  auto it = std::lower_bound(
      pairs_.begin(), pairs_.end(), original_line,
      [](const std::pair<int, int>& p, int v) { return p.second < v; });
  if (it == pairs_.end() || it->second != original_line) return std::nullopt;
  return it->first;
}

LineMapping LineMapping::compose(const LineMapping& outer,
                                 const LineMapping& inner) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(outer.pairs_.size());
  for (const auto& [r, mid] : outer.pairs_) {
    auto orig = inner.original_of(mid);
    if (!orig) {
      throw std::invalid_argument(
          "compose: outer mapping refers to a line missing from inner");
    }
    pairs.emplace_back(r, *orig);
  }
  return LineMapping(std::move(pairs));
}

}  // namespace snipfix
