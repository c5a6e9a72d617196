#include "snipfix/analyzer.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "builtin_analyzer.hpp"
#include "snipfix/diff.hpp"
#include "snipfix/errors.hpp"
#include "snipfix/external_analyzer.hpp"

namespace snipfix {

std::string category_name(RuleCategory c) {
  switch (c) {
    case RuleCategory::AST: return "AST";
    case RuleCategory::Local: return "Local";
    case RuleCategory::FileWide: return "FileWide";
    case RuleCategory::SecurityLocal: return "SecurityLocal";
    case RuleCategory::SecurityFlow: return "SecurityFlow";
  }
  return "AST";
}

RuleCategory category_from_name(const std::string& name) {
  if (name == "AST") return RuleCategory::AST;
  if (name == "Local") return RuleCategory::Local;
  if (name == "FileWide") return RuleCategory::FileWide;
  if (name == "SecurityLocal") return RuleCategory::SecurityLocal;
  if (name == "SecurityFlow") return RuleCategory::SecurityFlow;
  throw std::invalid_argument("unknown rule category: " + name);
}

AnalyzerHandle parse_analyzer_spec(const std::string& spec) {
  AnalyzerHandle handle;
  if (spec.rfind("builtin:", 0) == 0) {
    handle.kind = AnalyzerHandle::Kind::Builtin;
    handle.ruleset = spec.substr(8);
    if (handle.ruleset.empty()) handle.ruleset = "all";
    return handle;
  }
  if (spec.rfind("exec:", 0) == 0) {
    handle.kind = AnalyzerHandle::Kind::External;
    handle.command = spec.substr(5);
    if (handle.command.empty()) {
      throw std::invalid_argument("exec: analyzer spec needs a command");
    }
    return handle;
  }
  throw std::invalid_argument(
      "analyzer spec must be builtin:<ruleset> or exec:<command>: " + spec);
}

std::unique_ptr<Analyzer> make_analyzer(const AnalyzerHandle& handle) {
  if (handle.timeout.count() <= 0) {
    throw std::invalid_argument("analyzer timeout must be positive");
  }
  if (handle.kind == AnalyzerHandle::Kind::Builtin) {
    return std::make_unique<BuiltinAnalyzer>(handle.ruleset);
  }
  return std::make_unique<ExternalAnalyzer>(handle);
}

bool report_exists(Analyzer& analyzer, const SourceText& code,
                   const Report& target, const LineMapping& mapping) {
  for (const Report& r : analyzer.analyze(code)) {
    if (r.rule != target.rule) continue;
    auto orig = mapping.original_of(r.line);
    if (orig && *orig == target.line) return true;
  }
  return false;
}

std::vector<NodeId> approx_provenance_nodes(
    const SyntaxTree& tree, const std::vector<NodeId>& candidates,
    const Report& target) {
  if (!target.provenance_lines) return candidates;
  const auto& prov = *target.provenance_lines;
  std::vector<NodeId> out;
  for (NodeId id : candidates) {
    const SyntaxNode& n = tree.node(id);
    auto it = prov.lower_bound(n.start_line);
    if (it != prov.end() && *it <= n.end_line) out.push_back(id);
  }
  return out;
}

namespace {

bool has_parse_marker(const std::vector<Report>& reports) {
  return std::any_of(reports.begin(), reports.end(), [](const Report& r) {
    return r.rule == kParseMarkerRule;
  });
}

// Span of the innermost enclosing container (function body, handler, block
// owner) around `line`, or the whole file when there is none.
std::pair<int, int> enclosing_container_span(const SourceText& original,
                                             GrammarId grammar, int line) {
  try {
    SyntaxTree tree = parse(original, grammar);
    const SyntaxNode* best = nullptr;
    for (const auto& n : tree.nodes()) {
      if (n.id == 0) continue;
      if (n.children.empty()) continue;
      if (line < n.start_line || line > n.end_line) continue;
      if (!best || n.level > best->level) best = &n;
    }
    if (best) return {best->start_line, best->end_line};
  } catch (const ParseError&) {
  }
  return {1, std::max(1, original.line_count())};
}

}  // namespace

bool does_fix(Analyzer& analyzer, const SourceText& prediction,
              const SourceText& original, const Report& target) {
  auto reports = analyzer.analyze(prediction);
  if (has_parse_marker(reports)) return false;

  LineDiff diff = diff_lines(original, prediction);
  TrackedLine tracked = target.line >= 1 && target.line <= original.line_count()
                            ? track_line(diff, target.line)
                            : TrackedLine{TrackKind::Deleted, 0, 0, 0};

  auto same_rule_in = [&](int lo, int hi) {
    for (const Report& r : reports) {
      if (r.rule == target.rule && r.line >= lo && r.line <= hi) return true;
    }
    return false;
  };

  switch (tracked.kind) {
    case TrackKind::Matched:
      return !same_rule_in(tracked.line, tracked.line);
    case TrackKind::Deleted: {
      // The report's line is gone; insist the enclosing function stays clean.
      auto [s, e] = enclosing_container_span(original, analyzer.grammar(),
                                             target.line);
      int lo = 0, hi = 0;
      for (const auto& [a, b] : diff.matches) {
        if (a < s || a > e) continue;
        if (lo == 0) lo = b;
        hi = b;
      }
      if (lo == 0) return !same_rule_in(1, std::max(1, prediction.line_count()));
      return !same_rule_in(lo, hi);
    }
    case TrackKind::Replaced:
      // Ambiguous landing spot: conservatively require a fully clean file
      // for this rule.
      return !same_rule_in(1, std::max(1, prediction.line_count()));
  }
  return false;
}

bool no_new_issues(Analyzer& analyzer, const SourceText& prediction,
                   const SourceText& original) {
  std::map<std::string, int> before;
  for (const Report& r : analyzer.analyze(original)) ++before[r.rule];
  std::map<std::string, int> after;
  for (const Report& r : analyzer.analyze(prediction)) ++after[r.rule];
  for (const auto& [rule, count] : after) {
    auto it = before.find(rule);
    int prior = it == before.end() ? 0 : it->second;
    if (count > prior) return false;
  }
  return true;
}

}  // namespace snipfix
