#pragma once

#include <vector>

#include "snipfix/source_text.hpp"

namespace snipfix {

/// One-to-many map from reduced-code lines to prediction lines. Every
/// reduced line 1..len(c) has an entry (empty = deletion); concatenating the
/// entries in reduced-line order enumerates every prediction line exactly
/// once, in increasing order.
struct ReplacementMapping {
  std::vector<std::vector<int>> entries;  // entries[i] serves reduced line i+1

  const std::vector<int>& lines_for(int reduced_line) const {
    return entries.at(reduced_line - 1);
  }
  int size() const { return static_cast<int>(entries.size()); }
};

/// Diff the reduced code against the prediction and distribute each hunk's
/// prediction lines over its reduced lines. Unchanged lines map one-to-one.
/// Within a changed hunk the prediction lines are spread over the reduced
/// lines in order, front-loaded (the first reduced line absorbs the
/// remainder). A pure insertion attaches to the last reduced line of the
/// preceding context; an insertion before any context prepends to line 1.
ReplacementMapping compute_replacement_mapping(const SourceText& reduced,
                                               const SourceText& prediction);

/// Rebuild the full file: lines of `original` with a reduced counterpart are
/// replaced by that counterpart's prediction lines; all other lines pass
/// through unchanged. Throws MappingMismatchError when `mapping` is stale
/// (a mapped reduced line no longer equals its original line).
SourceText merge_back(const SourceText& original, const SourceText& reduced,
                      const SourceText& prediction,
                      const LineMapping& mapping);

}  // namespace snipfix
