#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "snipfix/analyzer.hpp"
#include "snipfix/dataset.hpp"

namespace snipfix {

/// Ranked model outputs for one sample. Reduced-form predictions are merged
/// back into the original file before scoring (unless pre-merge scoring is
/// requested).
struct PredictionSet {
  std::string sample_id;
  enum class Form { Reduced, Full } form = Form::Full;
  std::vector<std::string> predictions;  // model rank order
};

struct SampleScore {
  std::string sample_id;
  std::string category;
  std::map<int, bool> pass_at;   // k -> any of the first k predictions passed
  std::map<int, bool> exact_at;  // k -> any of the first k matched the gold
};

struct EvalResult {
  std::vector<SampleScore> per_sample;
  // aggregate key: category name or "overall"; value: k -> mean
  std::map<std::string, std::map<int, double>> pass_aggregate;
  std::map<std::string, std::map<int, double>> exact_aggregate;
  std::vector<std::string> errors;  // per-prediction analyzer failures
};

struct EvalInputs {
  std::vector<FixSample> samples;
  // FullOriginal counterparts by sample id; required to merge and score
  // reduced-form predictions against the full file.
  std::map<std::string, FixSample> originals;
  std::vector<PredictionSet> predictions;
  std::vector<int> ks = {1, 3, 5};  // ascending
  bool score_pre_merge = false;
};

/// Fraction of samples where one of the top-k predictions removes the target
/// report without introducing new reports. Unparseable or unmergeable
/// predictions count as failures.
EvalResult pass_at_k(const EvalInputs& inputs, Analyzer& analyzer);

/// Parallel variant: samples are scored independently, one analyzer per
/// worker. Results are identical to the serial path.
using AnalyzerFactory = std::function<std::unique_ptr<Analyzer>()>;
EvalResult pass_at_k(const EvalInputs& inputs, const AnalyzerFactory& factory,
                     int workers);

/// Fraction of samples where one of the top-k predictions equals the labeled
/// fix after normalization (trailing whitespace stripped, LF endings,
/// trailing blank lines dropped).
EvalResult exact_match_at_k(const EvalInputs& inputs);

std::string normalize_for_match(const SourceText& text);

/// Per-category table with Pass@k and ExactMatch@k columns.
std::string render_eval_table(const EvalResult& pass, const EvalResult& exact,
                              const std::vector<int>& ks);

}  // namespace snipfix
