#include <benchmark/benchmark.h>

#include "corpus.hpp"
#include "snipfix/analyzer.hpp"
#include "snipfix/diff.hpp"
#include "snipfix/merge.hpp"
#include "snipfix/reduce.hpp"
#include "snipfix/syntax.hpp"

namespace {

using namespace snipfix;

testing::TaintFixture bench_fixture(int filler) {
  testing::TaintFixtureOptions opts;
  opts.through_helper = true;
  opts.filler_functions = filler;
  opts.filler_statements = 2;
  return testing::make_taint_fixture(17, opts);
}

Report bench_target(Analyzer& analyzer, const SourceText& code) {
  for (const auto& r : analyzer.analyze(code)) {
    if (r.rule == "PT") return r;
  }
  return {};
}

void BM_ParseMiniJs(benchmark::State& state) {
  auto fx = bench_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse(fx.code, GrammarId::MiniJs));
  }
  state.SetItemsProcessed(state.iterations() * fx.code.line_count());
}
BENCHMARK(BM_ParseMiniJs)->Arg(4)->Arg(16)->Arg(64);

void BM_AnalyzeTaint(benchmark::State& state) {
  AnalyzerHandle handle;
  handle.ruleset = "PT";
  auto analyzer = make_analyzer(handle);
  auto fx = bench_fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyzer->analyze(fx.code));
  }
}
BENCHMARK(BM_AnalyzeTaint)->Arg(4)->Arg(16)->Arg(64);

void BM_CodeReduce(benchmark::State& state) {
  AnalyzerHandle handle;
  handle.ruleset = "PT";
  auto analyzer = make_analyzer(handle);
  auto fx = bench_fixture(static_cast<int>(state.range(0)));
  Report target = bench_target(*analyzer, fx.code);
  ReductionConfig cfg;
  cfg.mode = state.range(1) == 0 ? ReductionMode::Provenance
                                 : ReductionMode::VanillaHDD;
  long long calls = 0;
  for (auto _ : state) {
    ReductionOutcome out = code_reduce(fx.code, target, *analyzer, cfg);
    calls = out.analyzer_calls;
    benchmark::DoNotOptimize(out);
  }
  state.counters["analyzer_calls"] = static_cast<double>(calls);
}
BENCHMARK(BM_CodeReduce)
    ->Args({8, 0})
    ->Args({8, 1})
    ->Args({24, 0})
    ->Args({24, 1});

void BM_LineDiff(benchmark::State& state) {
  SourceText a = testing::random_text_file(3, static_cast<int>(state.range(0)),
                                           static_cast<int>(state.range(0)));
  SourceText b = testing::apply_random_edits(a, 9, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(diff_lines(a, b));
  }
}
BENCHMARK(BM_LineDiff)->Arg(64)->Arg(256)->Arg(1024);

void BM_MergeBack(benchmark::State& state) {
  SourceText original = testing::random_text_file(
      11, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  testing::Rng rng(5);
  std::vector<int> kept;
  std::vector<std::pair<int, int>> pairs;
  for (int l = 1; l <= original.line_count(); ++l) {
    if (rng.chance(40)) {
      kept.push_back(l);
      pairs.emplace_back(static_cast<int>(kept.size()), l);
    }
  }
  if (kept.empty()) {
    kept.push_back(1);
    pairs.emplace_back(1, 1);
  }
  SourceText reduced = original.subset(kept);
  SourceText prediction = testing::apply_random_edits(reduced, 6, 4);
  LineMapping mapping(pairs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        merge_back(original, reduced, prediction, mapping));
  }
}
BENCHMARK(BM_MergeBack)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
