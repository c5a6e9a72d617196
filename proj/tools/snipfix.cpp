// snipfix: reduce a file to the smallest snippet that still raises a static
// analysis report, merge edits made on the snippet back into the full file,
// build fix-pair datasets in several context flavors, and score repair
// predictions.

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "snipfix/analyzer.hpp"
#include "snipfix/dataset.hpp"
#include "snipfix/errors.hpp"
#include "snipfix/evalkit.hpp"
#include "snipfix/merge.hpp"
#include "snipfix/prompt.hpp"
#include "snipfix/reduce.hpp"
#include "snipfix/syntax.hpp"

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using namespace snipfix;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitReportAbsent = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << bytes;
}

std::string default_analyzer_spec() {
  if (const char* env = std::getenv("REDUCT_ANALYZER")) return env;
  return "builtin:all";
}

AnalyzerHandle handle_for(const std::string& spec, const std::string& grammar) {
  AnalyzerHandle handle = parse_analyzer_spec(spec);
  handle.grammar = grammar_from_name(grammar);
  if (handle.kind == AnalyzerHandle::Kind::Builtin) {
    handle.grammar = GrammarId::MiniJs;  // builtin rules are mini-js only
  }
  return handle;
}

LineMapping mapping_from_json(const json& pairs) {
  std::vector<std::pair<int, int>> out;
  for (const auto& entry : pairs) {
    out.emplace_back(entry.at(0).get<int>(), entry.at(1).get<int>());
  }
  return LineMapping(std::move(out));
}

json mapping_to_json(const LineMapping& mapping) {
  json out = json::array();
  for (const auto& [r, o] : mapping.pairs()) {
    out.push_back(json::array({r, o}));
  }
  return out;
}

// Find the target report in the input, preferring the analyzer's own
// instance so its provenance travels with it.
Report locate_target(Analyzer& analyzer, const SourceText& code,
                     const std::string& rule, int line) {
  for (const Report& r : analyzer.analyze(code)) {
    if (r.rule == rule && r.line == line) return r;
  }
  throw ReportAbsentError("report " + rule + " at line " +
                          std::to_string(line) + " is not present");
}

struct CommonOptions {
  std::string analyzer_spec = default_analyzer_spec();
  int workers = 1;
};

// ---------------------------------------------------------------------------

int cmd_reduce(const std::string& input, const std::string& rule, int line,
               const std::string& analyzer_spec, const std::string& grammar,
               const std::string& mode, const std::string& out_path,
               const std::string& map_path, int max_passes,
               long long max_calls) {
  auto analyzer = make_analyzer(handle_for(analyzer_spec, grammar));
  SourceText code = SourceText::from_bytes(read_file(input));

  Report target;
  try {
    target = locate_target(*analyzer, code, rule, line);
  } catch (const ReportAbsentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitReportAbsent;
  }

  ReductionConfig cfg;
  cfg.mode = mode == "hdd" ? ReductionMode::VanillaHDD
                           : ReductionMode::Provenance;
  cfg.max_fixpoint_iterations = max_passes;
  cfg.max_analyzer_calls = max_calls;

  ReductionOutcome outcome;
  try {
    outcome = code_reduce(code, target, *analyzer, cfg);
  } catch (const ReportAbsentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitReportAbsent;
  }

  if (!out_path.empty()) write_file(out_path, outcome.reduced.to_bytes());
  if (!map_path.empty()) {
    write_file(map_path, mapping_to_json(outcome.mapping).dump() + "\n");
  }
  if (out_path.empty()) std::cout << outcome.reduced.to_bytes();

  std::cerr << "reduced " << code.line_count() << " -> "
            << outcome.reduced.line_count() << " lines, "
            << outcome.analyzer_calls << " analyzer calls, "
            << outcome.fixpoint_passes << " passes ("
            << mode_name(outcome.mode) << " mode)\n";
  if (outcome.budget_exhausted) {
    std::cerr << "warning: analyzer call budget exhausted; result is the "
                 "best state reached, not necessarily minimal\n";
    return kExitBudget;
  }
  return kExitOk;
}

int cmd_merge(const std::string& original_path, const std::string& reduced_path,
              const std::string& prediction_path, const std::string& map_path,
              const std::string& out_path) {
  SourceText original = SourceText::from_bytes(read_file(original_path));
  SourceText reduced = SourceText::from_bytes(read_file(reduced_path));
  SourceText prediction = SourceText::from_bytes(read_file(prediction_path));
  LineMapping mapping =
      mapping_from_json(json::parse(read_file(map_path)));

  SourceText merged = merge_back(original, reduced, prediction, mapping);
  if (out_path.empty()) {
    std::cout << merged.to_bytes();
  } else {
    write_file(out_path, merged.to_bytes());
  }
  return kExitOk;
}

// Run fn(analyzer, i) over [0, n); each worker owns one analyzer handle.
void parallel_for(const AnalyzerHandle& handle, int n, int workers,
                  const std::function<void(Analyzer&, int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers <= 1) {
    auto analyzer = make_analyzer(handle);
    for (int i = 0; i < n; ++i) fn(*analyzer, i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      auto analyzer = make_analyzer(handle);
      while (true) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        fn(*analyzer, i);
      }
    });
  }
  for (auto& t : threads) t.join();
}

int cmd_mine(const std::string& pairs_path, const std::string& analyzer_spec,
             const std::string& grammar, const std::string& out_path,
             int workers) {
  auto records = import_pairs_jsonl(pairs_path);
  AnalyzerHandle handle = handle_for(analyzer_spec, grammar);

  std::vector<std::string> lines(records.size());
  std::vector<std::string> failures(records.size());
  parallel_for(handle, static_cast<int>(records.size()), workers,
               [&](Analyzer& analyzer, int i) {
    const auto& rec = records[static_cast<size_t>(i)];
    try {
      std::string chunk;
      for (const Candidate& c : mine_candidates(rec.pre, rec.post, analyzer)) {
        ordered_json j;
        j["id"] = rec.id;
        j["repo"] = rec.repo;
        j["rule"] = c.report.rule;
        j["category"] = category_name(c.report.category);
        j["message"] = c.report.message;
        j["line"] = c.report.line;
        switch (c.evidence.tracking) {
          case TrackKind::Matched:
            j["tracking"] = "matched";
            j["post_line"] = c.evidence.post_line;
            break;
          case TrackKind::Deleted:
            j["tracking"] = "deleted";
            break;
          case TrackKind::Replaced:
            j["tracking"] = "replaced";
            j["post_first"] = c.evidence.post_first;
            j["post_last"] = c.evidence.post_last;
            break;
        }
        j["ambiguous"] = c.evidence.ambiguous;
        chunk += j.dump();
        chunk += '\n';
      }
      lines[static_cast<size_t>(i)] = std::move(chunk);
    } catch (const std::exception& e) {
      failures[static_cast<size_t>(i)] = rec.id + ": " + e.what();
    }
  });

  for (const auto& f : failures) {
    if (!f.empty()) {
      std::cerr << "error: " << f << "\n";
      return kExitFailure;
    }
  }
  std::string payload;
  for (const auto& l : lines) payload += l;
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    write_file(out_path, payload);
  }
  return kExitOk;
}

int cmd_flavor(const std::string& pairs_path, const std::string& analyzer_spec,
               const std::string& grammar, const std::string& flavors_arg,
               const std::string& out_path, int workers, int max_passes,
               long long max_calls) {
  auto records = import_pairs_jsonl(pairs_path);
  AnalyzerHandle handle = handle_for(analyzer_spec, grammar);

  FlavorOptions options;
  options.reduction.max_fixpoint_iterations = max_passes;
  options.reduction.max_analyzer_calls = max_calls;
  if (flavors_arg != "all") {
    options.flavors.clear();
    std::stringstream ss(flavors_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) options.flavors.insert(flavor_from_name(item));
    }
    if (options.flavors.empty()) {
      std::cerr << "error: no flavors selected\n";
      return kExitFailure;
    }
  }

  std::vector<FlavorOutcome> outcomes(records.size());
  parallel_for(handle, static_cast<int>(records.size()), workers,
               [&](Analyzer& analyzer, int i) {
    outcomes[static_cast<size_t>(i)] =
        build_flavors(records[static_cast<size_t>(i)], analyzer, options);
  });

  std::vector<FixSample> samples;
  for (auto& o : outcomes) {
    for (auto& s : o.samples) samples.push_back(std::move(s));
    for (const auto& skip : o.skipped) {
      std::cerr << "skipped " << skip.id << ": " << skip.reason << "\n";
    }
  }

  auto revalidator = make_analyzer(handle);
  if (out_path.empty()) {
    std::cout << export_jsonl_string(samples, revalidator.get());
  } else {
    export_jsonl(samples, out_path, revalidator.get());
  }
  std::cerr << "emitted " << samples.size() << " samples from "
            << records.size() << " pairs\n";
  return kExitOk;
}

std::vector<PredictionSet> import_predictions(const std::string& path) {
  std::vector<PredictionSet> out;
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
    }
    PredictionSet p;
    try {
      p.sample_id = j.at("sample_id").get<std::string>();
      for (const auto& item : j.at("predictions")) {
        p.predictions.push_back(item.get<std::string>());
      }
      std::string form = j.value("form", "full");
      if (form == "reduced") {
        p.form = PredictionSet::Form::Reduced;
      } else if (form == "full") {
        p.form = PredictionSet::Form::Full;
      } else {
        throw std::invalid_argument("form must be reduced or full");
      }
    } catch (const json::exception& e) {
      throw SchemaError(line_no, e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

int cmd_eval(const std::string& samples_path, const std::string& originals_path,
             const std::string& predictions_path,
             const std::string& analyzer_spec, const std::string& grammar,
             const std::string& ks_arg, bool pre_merge, int workers) {
  EvalInputs inputs;
  inputs.samples = import_jsonl(samples_path);
  if (inputs.samples.empty()) {
    std::cerr << "error: no samples\n";
    return kExitFailure;
  }
  if (!originals_path.empty()) {
    for (auto& s : import_jsonl(originals_path)) {
      inputs.originals.emplace(s.id, std::move(s));
    }
  }
  inputs.predictions = import_predictions(predictions_path);
  inputs.score_pre_merge = pre_merge;

  inputs.ks.clear();
  std::stringstream ss(ks_arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) inputs.ks.push_back(std::stoi(item));
  }
  std::sort(inputs.ks.begin(), inputs.ks.end());
  if (inputs.ks.empty() || inputs.ks.front() < 1) {
    std::cerr << "error: k list must hold positive integers\n";
    return kExitFailure;
  }

  AnalyzerHandle handle = handle_for(analyzer_spec, grammar);
  EvalResult pass = pass_at_k(
      inputs, [&] { return make_analyzer(handle); }, workers);
  EvalResult exact = exact_match_at_k(inputs);

  ordered_json out;
  out["samples"] = inputs.samples.size();
  auto agg_json = [](const std::map<std::string, std::map<int, double>>& agg) {
    ordered_json j;
    for (const auto& [key, per_k] : agg) {
      ordered_json inner;
      for (const auto& [k, v] : per_k) inner[std::to_string(k)] = v;
      j[key] = std::move(inner);
    }
    return j;
  };
  out["pass_at_k"] = agg_json(pass.pass_aggregate);
  out["exact_match_at_k"] = agg_json(exact.exact_aggregate);
  ordered_json errors = ordered_json::array();
  for (const auto& e : pass.errors) errors.push_back(e);
  out["errors"] = std::move(errors);
  std::cout << out.dump() << "\n";
  std::cerr << render_eval_table(pass, exact, inputs.ks);
  return kExitOk;
}

int cmd_prompt(const std::string& rule, const std::string& description,
               const std::string& query_path, const std::string& train_path,
               int shots, uint64_t seed, bool no_reduction_note,
               bool run_completion, int n, double temperature) {
  std::vector<std::pair<std::string, std::string>> shot_pairs;
  if (shots > 0) {
    if (train_path.empty()) {
      std::cerr << "error: --train is required when --shots > 0\n";
      return kExitFailure;
    }
    shot_pairs = pick_shots(import_jsonl(train_path), rule, shots, seed);
  }
  std::string query = read_file(query_path);
  PromptBundle bundle =
      build_prompt(rule, description, shot_pairs, query, !no_reduction_note);

  ordered_json j;
  j["system"] = bundle.system;
  ordered_json turns = ordered_json::array();
  for (const auto& t : bundle.turns) {
    turns.push_back(ordered_json{{"role", t.role}, {"content", t.content}});
  }
  j["turns"] = std::move(turns);
  std::cout << j.dump() << "\n";

  if (run_completion) {
    CompletionOptions options;
    options.n = n;
    options.temperature = temperature;
    auto completions = complete(ModelEndpoint::from_env(), bundle, options);
    for (const auto& c : completions) {
      std::cout << ordered_json{{"prediction", c}}.dump() << "\n";
    }
  }
  return kExitOk;
}

int cmd_bench_calls(const std::string& samples_path,
                    const std::string& analyzer_spec,
                    const std::string& grammar, int max_passes,
                    long long max_calls) {
  auto samples = import_jsonl(samples_path);
  if (samples.empty()) {
    std::cerr << "error: no samples\n";
    return kExitFailure;
  }
  auto analyzer = make_analyzer(handle_for(analyzer_spec, grammar));

  std::vector<std::pair<SourceText, Report>> corpus;
  for (const auto& s : samples) {
    Report target;
    target.rule = s.rule;
    target.category = s.category;
    target.message = s.message;
    target.line = s.line;
    corpus.emplace_back(s.pre, target);
  }

  ReductionConfig cfg;
  cfg.max_fixpoint_iterations = max_passes;
  cfg.max_analyzer_calls = max_calls;
  CallCountSummary summary = compare_call_counts(corpus, *analyzer, cfg);

  for (const auto& s : summary.samples) {
    if (s.failed) {
      std::cerr << "error: sample " << s.id << " failed: " << s.error << "\n";
      return kExitFailure;
    }
  }

  ordered_json out;
  out["samples"] = summary.samples.size();
  out["provenance"] = {{"mean", summary.provenance_mean},
                       {"geometric_mean", summary.provenance_geomean}};
  out["hdd"] = {{"mean", summary.hdd_mean},
                {"geometric_mean", summary.hdd_geomean}};
  out["geomean_ratio"] = summary.geomean_ratio;
  ordered_json per_sample = ordered_json::array();
  for (const auto& s : summary.samples) {
    per_sample.push_back(ordered_json{{"id", s.id},
                                      {"provenance_calls", s.provenance_calls},
                                      {"hdd_calls", s.hdd_calls}});
  }
  out["per_sample"] = std::move(per_sample);
  std::cout << out.dump() << "\n";
  std::cerr << "provenance geomean " << summary.provenance_geomean
            << " vs hdd geomean " << summary.hdd_geomean << " (ratio "
            << summary.geomean_ratio << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Report-preserving code reduction, merge-back, dataset "
               "construction and repair-prediction scoring"};
  app.require_subcommand(1);
  app.set_config("--config");

  std::string analyzer_spec = default_analyzer_spec();
  std::string grammar = "mini-js";
  int workers = 1;
  int max_passes = 10;
  long long max_calls = 2000;

  // reduce
  auto* reduce = app.add_subcommand("reduce", "Reduce a file while keeping a report");
  std::string r_input, r_rule, r_mode = "provenance", r_out, r_map;
  int r_line = 0;
  reduce->add_option("--input", r_input)->required();
  reduce->add_option("--rule", r_rule)->required();
  reduce->add_option("--line", r_line)->required();
  reduce->add_option("--analyzer", analyzer_spec);
  reduce->add_option("--grammar", grammar)->check(CLI::IsMember({"mini-js", "braces"}));
  reduce->add_option("--mode", r_mode)->check(CLI::IsMember({"provenance", "hdd"}));
  reduce->add_option("--out", r_out);
  reduce->add_option("--map", r_map);
  reduce->add_option("--max-passes", max_passes);
  reduce->add_option("--max-analyzer-calls", max_calls);

  // merge
  auto* merge = app.add_subcommand("merge", "Merge a prediction back into the original file");
  std::string m_original, m_reduced, m_prediction, m_map, m_out;
  merge->add_option("--original", m_original)->required();
  merge->add_option("--reduced", m_reduced)->required();
  merge->add_option("--prediction", m_prediction)->required();
  merge->add_option("--map", m_map)->required();
  merge->add_option("--out", m_out);

  // mine
  auto* mine = app.add_subcommand("mine", "Mine fix candidates from (pre, post) pairs");
  std::string n_pairs, n_out;
  mine->add_option("--pairs", n_pairs)->required();
  mine->add_option("--analyzer", analyzer_spec);
  mine->add_option("--grammar", grammar)->check(CLI::IsMember({"mini-js", "braces"}));
  mine->add_option("--out", n_out);
  mine->add_option("--workers", workers);

  // flavor
  auto* flavor = app.add_subcommand("flavor", "Build dataset samples in context flavors");
  std::string f_pairs, f_out, f_flavors = "all";
  flavor->add_option("--pairs", f_pairs)->required();
  flavor->add_option("--analyzer", analyzer_spec);
  flavor->add_option("--grammar", grammar)->check(CLI::IsMember({"mini-js", "braces"}));
  flavor->add_option("--flavors", f_flavors);
  flavor->add_option("--out", f_out);
  flavor->add_option("--workers", workers);
  flavor->add_option("--max-passes", max_passes);
  flavor->add_option("--max-analyzer-calls", max_calls);

  // eval
  auto* eval = app.add_subcommand("eval", "Score predictions with Pass@k and ExactMatch@k");
  std::string e_samples, e_originals, e_predictions, e_ks = "1,3,5";
  bool e_pre_merge = false;
  eval->add_option("--samples", e_samples)->required();
  eval->add_option("--originals", e_originals);
  eval->add_option("--predictions", e_predictions)->required();
  eval->add_option("--analyzer", analyzer_spec);
  eval->add_option("--grammar", grammar)->check(CLI::IsMember({"mini-js", "braces"}));
  eval->add_option("--workers", workers);
  eval->add_option("--k", e_ks);
  eval->add_flag("--pre-merge", e_pre_merge);

  // prompt
  auto* prompt = app.add_subcommand("prompt", "Build the conversation prompt for a query");
  std::string p_rule, p_description, p_query, p_train;
  int p_shots = 0, p_n = 1;
  std::uint64_t p_seed = 0;
  double p_temperature = 0.2;
  bool p_no_note = false, p_complete = false;
  prompt->add_option("--rule", p_rule)->required();
  prompt->add_option("--description", p_description)->required();
  prompt->add_option("--query", p_query)->required();
  prompt->add_option("--train", p_train);
  prompt->add_option("--shots", p_shots);
  prompt->add_option("--seed", p_seed);
  prompt->add_option("--n", p_n);
  prompt->add_option("--temperature", p_temperature);
  prompt->add_flag("--no-reduction-note", p_no_note);
  prompt->add_flag("--complete", p_complete);

  // bench-calls
  auto* bench = app.add_subcommand("bench-calls", "Compare analyzer calls: provenance vs vanilla HDD");
  std::string b_samples;
  bench->add_option("--samples", b_samples)->required();
  bench->add_option("--analyzer", analyzer_spec);
  bench->add_option("--grammar", grammar)->check(CLI::IsMember({"mini-js", "braces"}));
  bench->add_option("--max-passes", max_passes);
  bench->add_option("--max-analyzer-calls", max_calls);

  CLI11_PARSE(app, argc, argv);

  try {
    if (reduce->parsed()) {
      return cmd_reduce(r_input, r_rule, r_line, analyzer_spec, grammar,
                        r_mode, r_out, r_map, max_passes, max_calls);
    }
    if (merge->parsed()) {
      return cmd_merge(m_original, m_reduced, m_prediction, m_map, m_out);
    }
    if (mine->parsed()) {
      return cmd_mine(n_pairs, analyzer_spec, grammar, n_out, workers);
    }
    if (flavor->parsed()) {
      return cmd_flavor(f_pairs, analyzer_spec, grammar, f_flavors, f_out,
                        workers, max_passes, max_calls);
    }
    if (eval->parsed()) {
      return cmd_eval(e_samples, e_originals, e_predictions, analyzer_spec,
                      grammar, e_ks, e_pre_merge, workers);
    }
    if (prompt->parsed()) {
      return cmd_prompt(p_rule, p_description, p_query, p_train, p_shots,
                        p_seed, p_no_note, p_complete, p_n, p_temperature);
    }
    if (bench->parsed()) {
      return cmd_bench_calls(b_samples, analyzer_spec, grammar, max_passes,
                             max_calls);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
