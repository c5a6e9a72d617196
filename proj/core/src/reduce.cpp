#include "snipfix/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>

#include "snipfix/errors.hpp"

namespace snipfix {

std::string mode_name(ReductionMode mode) {
  return mode == ReductionMode::Provenance ? "provenance" : "hdd";
}

namespace {

struct BudgetStop {};

struct State {
  SourceText code;
  SyntaxTree tree;
  LineMapping mapping;  // current code line -> original file line
  Report current;       // target instance in current coordinates
};

class Engine {
 public:
  Engine(Analyzer& analyzer, const Report& target, long long max_calls,
         const AcceptObserver& observer)
      : analyzer_(analyzer),
        target_(target),
        max_calls_(max_calls),
        observer_(observer) {}

  long long calls = 0;
  std::vector<TraceEntry> trace;
  bool budget_exhausted = false;

  // Locate the target (rule at original line) among reports of the current
  // code, translating lines through the mapping.
  std::optional<Report> find_target(const std::vector<Report>& reports,
                                    const LineMapping& mapping) const {
    for (const Report& r : reports) {
      if (r.rule != target_.rule) continue;
      auto orig = mapping.original_of(r.line);
      if (orig && *orig == target_.line) return r;
    }
    return std::nullopt;
  }

  std::vector<Report> analyze_counted(const SourceText& code) {
    if (calls >= max_calls_) {
      budget_exhausted = true;
      throw BudgetStop{};
    }
    ++calls;
    return analyzer_.analyze(code);
  }

  // Remove `victims` from `st`; on success (candidate parses and the report
  // survives) advance `st` and return true.
  bool try_removal(State& st, const std::vector<NodeId>& victims, int level) {
    RemovalResult rr =
        remove_nodes_from_code(victims, st.code, st.tree, st.mapping);
    if (!rr.tree) {
      trace.push_back(TraceEntry{level, static_cast<int>(victims.size()),
                                 false, false});
      return false;
    }
    auto reports = analyze_counted(rr.code);
    auto found = find_target(reports, rr.mapping);
    trace.push_back(TraceEntry{level, static_cast<int>(victims.size()),
                               found.has_value(), true});
    if (!found) return false;
    st.code = std::move(rr.code);
    st.tree = std::move(*rr.tree);
    st.mapping = std::move(rr.mapping);
    st.current = std::move(*found);
    if (observer_) observer_(st.code, st.mapping);
    return true;
  }

  // ddmin over the level's node set against the fixed base state. Keep-set
  // semantics: testing `keep` removes (all \ keep) from the base. The last
  // accepted configuration becomes the new state.
  bool ddmin_level(State& st, std::vector<NodeId> all, int level) {
    if (all.empty()) return false;
    const State base = st;

    auto test_keep = [&](const std::vector<NodeId>& keep) {
      std::set<NodeId> kept(keep.begin(), keep.end());
      std::vector<NodeId> victims;
      for (NodeId id : all) {
        if (!kept.count(id)) victims.push_back(id);
      }
      State candidate = base;
      if (!try_removal(candidate, victims, level)) return false;
      st = std::move(candidate);
      return true;
    };

    bool changed = false;
    if (test_keep({})) return true;  // the whole level is removable

    std::vector<NodeId> s = all;
    size_t n = 2;
    while (s.size() >= 2) {
      n = std::min(n, s.size());
      // chunk boundaries: first chunks take the remainder
      std::vector<std::vector<NodeId>> chunks(n);
      size_t base_size = s.size() / n;
      size_t extra = s.size() % n;
      size_t idx = 0;
      for (size_t c = 0; c < n; ++c) {
        size_t len = base_size + (c < extra ? 1 : 0);
        chunks[c].assign(s.begin() + idx, s.begin() + idx + len);
        idx += len;
      }

      bool found = false;
      // complements first: each success removes one chunk
      for (size_t c = 0; c < n && !found; ++c) {
        std::vector<NodeId> keep;
        std::set<NodeId> drop(chunks[c].begin(), chunks[c].end());
        for (NodeId id : s) {
          if (!drop.count(id)) keep.push_back(id);
        }
        if (test_keep(keep)) {
          s = std::move(keep);
          n = std::max<size_t>(n - 1, 2);
          found = true;
          changed = true;
        }
      }
      if (found) continue;
      if (n > 2) {
        for (size_t c = 0; c < n && !found; ++c) {
          if (test_keep(chunks[c])) {
            s = chunks[c];
            n = 2;
            found = true;
            changed = true;
          }
        }
        if (found) continue;
      }
      if (n < s.size()) {
        n = std::min(s.size(), n * 2);
        continue;
      }
      break;
    }
    return changed;
  }

 private:
  Analyzer& analyzer_;
  const Report& target_;
  long long max_calls_;
  const AcceptObserver& observer_;
};

}  // namespace

DdminOutcome ddmin(const std::vector<NodeId>& nodes, const Report& target,
                   const SourceText& code, const SyntaxTree& tree,
                   const LineMapping& mapping, Analyzer& analyzer,
                   long long max_analyzer_calls) {
  AcceptObserver no_observer;
  Engine engine(analyzer, target, max_analyzer_calls, no_observer);
  State st{code, tree, mapping, target};
  const int level = nodes.empty() ? 0 : tree.node(nodes.front()).level;
  bool changed = false;
  try {
    changed = engine.ddmin_level(st, nodes, level);
  } catch (const BudgetStop&) {
  }
  DdminOutcome out{std::move(st.code),    std::move(st.tree),
                   std::move(st.mapping), engine.calls,
                   std::move(engine.trace), changed,
                   engine.budget_exhausted};
  return out;
}

ReductionOutcome code_reduce(const SourceText& code, const Report& target,
                             Analyzer& analyzer, const ReductionConfig& cfg,
                             const AcceptObserver& observer) {
  if (cfg.max_fixpoint_iterations < 1 || cfg.max_analyzer_calls < 1) {
    throw std::invalid_argument("reduction limits must be >= 1");
  }

  SyntaxTree tree;
  try {
    tree = parse(code, analyzer.grammar());
  } catch (const ParseError& e) {
    throw ReportAbsentError(std::string("input does not parse: ") + e.what());
  }

  Engine engine(analyzer, target, cfg.max_analyzer_calls, observer);
  auto initial_reports = engine.analyze_counted(code);
  auto initial = engine.find_target(initial_reports,
                                    LineMapping::identity(code.line_count()));
  if (!initial) {
    throw ReportAbsentError("report " + target.rule + " at line " +
                            std::to_string(target.line) +
                            " is not present in the input");
  }

  State st{code, std::move(tree), LineMapping::identity(code.line_count()),
           std::move(*initial)};

  int passes = 0;
  try {
    for (int pass = 0; pass < cfg.max_fixpoint_iterations; ++pass) {
      ++passes;
      bool changed = false;
      for (int level = 0; level <= st.tree.depth(); ++level) {
        auto nodes = get_nodes(st.tree, level);
        if (nodes.empty()) continue;
        if (cfg.mode == ReductionMode::Provenance) {
          auto prov = approx_provenance_nodes(st.tree, nodes, st.current);
          std::set<NodeId> keep(prov.begin(), prov.end());
          std::vector<NodeId> victims;
          for (NodeId id : nodes) {
            if (!keep.count(id)) victims.push_back(id);
          }
          if (engine.try_removal(st, victims, level) && !victims.empty()) {
            changed = true;
          }
          nodes = get_nodes(st.tree, level);
        }
        if (engine.ddmin_level(st, nodes, level)) changed = true;
      }
      if (!changed) break;
    }
  } catch (const BudgetStop&) {
  }

  ReductionOutcome out;
  out.reduced = std::move(st.code);
  out.mapping = std::move(st.mapping);
  out.analyzer_calls = engine.calls;
  out.mode = cfg.mode;
  out.trace = std::move(engine.trace);
  out.budget_exhausted = engine.budget_exhausted;
  out.fixpoint_passes = passes;
  return out;
}

CallCountSummary compare_call_counts(
    const std::vector<std::pair<SourceText, Report>>& corpus,
    Analyzer& analyzer, const ReductionConfig& base_cfg) {
  CallCountSummary summary;
  double prov_sum = 0, prov_log_sum = 0, hdd_sum = 0, hdd_log_sum = 0;
  int ok = 0;

  for (size_t i = 0; i < corpus.size(); ++i) {
    const auto& [code, report] = corpus[i];
    CallCountSample sample;
    sample.id = "sample-" + std::to_string(i);
    try {
      ReductionConfig prov_cfg = base_cfg;
      prov_cfg.mode = ReductionMode::Provenance;
      auto with_prov = code_reduce(code, report, analyzer, prov_cfg);

      ReductionConfig hdd_cfg = base_cfg;
      hdd_cfg.mode = ReductionMode::VanillaHDD;
      auto plain = code_reduce(code, report, analyzer, hdd_cfg);

      if (with_prov.budget_exhausted || plain.budget_exhausted) {
        throw std::runtime_error("analyzer call budget exhausted");
      }
      sample.provenance_calls = with_prov.analyzer_calls;
      sample.hdd_calls = plain.analyzer_calls;
    } catch (const std::exception& e) {
      sample.failed = true;
      sample.error = e.what();
    }
    if (!sample.failed) {
      ++ok;
      prov_sum += static_cast<double>(sample.provenance_calls);
      prov_log_sum += std::log(static_cast<double>(sample.provenance_calls));
      hdd_sum += static_cast<double>(sample.hdd_calls);
      hdd_log_sum += std::log(static_cast<double>(sample.hdd_calls));
    } else {
      ++summary.failed_samples;
    }
    summary.samples.push_back(std::move(sample));
  }

  if (ok > 0) {
    summary.provenance_mean = prov_sum / ok;
    summary.provenance_geomean = std::exp(prov_log_sum / ok);
    summary.hdd_mean = hdd_sum / ok;
    summary.hdd_geomean = std::exp(hdd_log_sum / ok);
    summary.geomean_ratio = summary.provenance_geomean / summary.hdd_geomean;
  }
  return summary;
}

}  // namespace snipfix
