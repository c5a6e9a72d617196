#pragma once

#include <optional>
#include <set>
#include <string>

namespace snipfix {

enum class RuleCategory { AST, Local, FileWide, SecurityLocal, SecurityFlow };

std::string category_name(RuleCategory c);
RuleCategory category_from_name(const std::string& name);

/// Marker rule emitted by builtin analyzers when the input does not parse.
inline constexpr const char* kParseMarkerRule = "__parse__";

/// One analyzer finding: the (code, line, issue) triple plus the optional
/// approximate provenance the analyzer derived for it.
struct Report {
  std::string rule;
  RuleCategory category = RuleCategory::AST;
  std::string message;
  int line = 0;  // 1-based
  std::optional<std::set<int>> provenance_lines;

  bool operator==(const Report& other) const {
    return rule == other.rule && category == other.category &&
           message == other.message && line == other.line &&
           provenance_lines == other.provenance_lines;
  }
};

}  // namespace snipfix
