#include "snipfix/merge.hpp"

#include <algorithm>

#include "snipfix/diff.hpp"
#include "snipfix/errors.hpp"

namespace snipfix {

ReplacementMapping compute_replacement_mapping(const SourceText& reduced,
                                               const SourceText& prediction) {
  ReplacementMapping out;
  out.entries.assign(reduced.line_count(), {});
  if (reduced.line_count() == 0) return out;

  LineDiff diff = diff_lines(reduced, prediction);
  for (const auto& [a, b] : diff.matches) {
    out.entries[a - 1].push_back(b);
  }
  for (const auto& h : diff.hunks) {
    if (h.b_empty()) continue;  // deletion: entries stay empty
    std::vector<int> pred_lines;
    for (int b = h.b_first; b <= h.b_last; ++b) pred_lines.push_back(b);

    if (!h.a_empty()) {
      int width = h.a_last - h.a_first + 1;
      int per = static_cast<int>(pred_lines.size()) / width;
      int extra = static_cast<int>(pred_lines.size()) % width;
      int next = 0;
      for (int a = h.a_first; a <= h.a_last; ++a) {
        int take = per + (a - h.a_first < extra ? 1 : 0);
        for (int k = 0; k < take; ++k) {
          out.entries[a - 1].push_back(pred_lines[next++]);
        }
      }
    } else if (h.a_first > 1) {
      // insertion between matches: attach to the preceding reduced line
      auto& entry = out.entries[h.a_first - 2];
      entry.insert(entry.end(), pred_lines.begin(), pred_lines.end());
    } else {
      // insertion before any context: lead into the first reduced line
      auto& entry = out.entries[0];
      entry.insert(entry.begin(), pred_lines.begin(), pred_lines.end());
    }
  }
  return out;
}

SourceText merge_back(const SourceText& original, const SourceText& reduced,
                      const SourceText& prediction,
                      const LineMapping& mapping) {
  for (const auto& [r, o] : mapping.pairs()) {
    if (r < 1 || r > reduced.line_count() || o < 1 ||
        o > original.line_count()) {
      throw MappingMismatchError("line mapping out of range");
    }
    if (reduced.line(r) != original.line(o)) {
      throw MappingMismatchError(
          "mapping is stale: reduced line " + std::to_string(r) +
          " does not match original line " + std::to_string(o));
    }
  }

  ReplacementMapping repl = compute_replacement_mapping(reduced, prediction);
  std::vector<std::string> lines;
  for (int i = 1; i <= original.line_count(); ++i) {
    auto lc = mapping.reduced_of(i);
    if (!lc) {
      lines.push_back(original.line(i));
      continue;
    }
    for (int p : repl.lines_for(*lc)) {
      lines.push_back(prediction.line(p));
    }
  }
  return SourceText::from_lines(std::move(lines), original.line_ending(),
                                original.trailing_newline());
}

}  // namespace snipfix
