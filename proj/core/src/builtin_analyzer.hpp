#pragma once

// Builtin toy checkers, one per rule category:
//   DuplicateKey  (AST)            duplicate key in an object literal
//   OpenNotClosed (Local)          open(...) with no close in the function
//   ArityMismatch (FileWide)       call arity differs from the declaration
//   BannedCall    (SecurityLocal)  eval(), child_process.exec with '+'
//   PT            (SecurityFlow)   request-to-filesystem taint flow

#include <set>
#include <string>
#include <vector>

#include "snipfix/analyzer.hpp"

namespace snipfix {

class BuiltinAnalyzer : public Analyzer {
 public:
  /// `ruleset` is "all" or a comma-separated list of rule ids.
  explicit BuiltinAnalyzer(const std::string& ruleset);

  static const std::vector<std::string>& all_rules();
  static std::string rule_description(const std::string& rule);

 protected:
  std::vector<Report> run(const SourceText& code) override;

 private:
  bool enabled(const std::string& rule) const;
  std::set<std::string> rules_;
};

}  // namespace snipfix
