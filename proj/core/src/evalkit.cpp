#include "snipfix/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <thread>

#include "snipfix/merge.hpp"

namespace snipfix {

std::string normalize_for_match(const SourceText& text) {
  std::vector<std::string> lines = text.lines();
  for (auto& line : lines) {
    size_t end = line.find_last_not_of(" \t\r");
    line = end == std::string::npos ? "" : line.substr(0, end + 1);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

namespace {

struct ScoringView {
  SourceText original;   // code the metric is computed against
  SourceText gold;       // labeled fix in the same coordinates
  Report target;
  bool valid = true;
  std::string error;
};

ScoringView view_for(const EvalInputs& inputs, const FixSample& sample) {
  ScoringView v;
  v.target.rule = sample.rule;
  v.target.category = sample.category;
  v.target.message = sample.message;
  if (inputs.score_pre_merge || sample.flavor != Flavor::CodeReduced) {
    v.original = sample.pre;
    v.gold = sample.post;
    v.target.line = sample.line;
    return v;
  }
  auto it = inputs.originals.find(sample.id);
  if (it == inputs.originals.end()) {
    v.valid = false;
    v.error = "sample " + sample.id + ": no FullOriginal counterpart";
    return v;
  }
  v.original = it->second.pre;
  v.gold = it->second.post;
  v.target.line = it->second.line;
  return v;
}

// Merge a raw prediction into full-file form when needed.
bool materialize(const EvalInputs& inputs, const FixSample& sample,
                 const ScoringView& view, PredictionSet::Form form,
                 const std::string& raw, SourceText* out, std::string* error) {
  SourceText pred = SourceText::from_bytes(raw);
  if (form == PredictionSet::Form::Full || inputs.score_pre_merge ||
      sample.flavor != Flavor::CodeReduced) {
    *out = std::move(pred);
    return true;
  }
  if (!sample.mapping) {
    *error = "reduced sample carries no line mapping";
    return false;
  }
  try {
    *out = merge_back(view.original, sample.pre, pred, *sample.mapping);
    return true;
  } catch (const std::exception& e) {
    *error = e.what();
    return false;
  }
}

const PredictionSet* find_predictions(const EvalInputs& inputs,
                                      const std::string& id) {
  for (const auto& p : inputs.predictions) {
    if (p.sample_id == id) return &p;
  }
  return nullptr;
}

void aggregate(EvalResult& result, const std::vector<int>& ks, bool exact) {
  std::map<std::string, std::map<int, std::pair<int, int>>> buckets;
  for (const auto& score : result.per_sample) {
    const auto& per_k = exact ? score.exact_at : score.pass_at;
    for (int k : ks) {
      bool hit = per_k.count(k) && per_k.at(k);
      auto bump = [&](const std::string& key) {
        auto& [num, den] = buckets[key][k];
        num += hit ? 1 : 0;
        den += 1;
      };
      bump(score.category);
      bump("overall");
    }
  }
  auto& target = exact ? result.exact_aggregate : result.pass_aggregate;
  for (const auto& [key, per_k] : buckets) {
    for (const auto& [k, frac] : per_k) {
      target[key][k] =
          frac.second == 0
              ? 0.0
              : static_cast<double>(frac.first) / frac.second;
    }
  }
}

template <typename Judge>
SampleScore score_sample(const EvalInputs& inputs, const FixSample& sample,
                         const std::vector<int>& ks, bool exact, Judge&& judge,
                         std::vector<std::string>& errors) {
  SampleScore score;
  score.sample_id = sample.id;
  score.category = category_name(sample.category);

  ScoringView view = view_for(inputs, sample);
  const PredictionSet* preds = find_predictions(inputs, sample.id);

  std::vector<bool> per_prediction;
  if (view.valid && preds) {
    for (const auto& raw : preds->predictions) {
      SourceText materialized;
      std::string error;
      if (!materialize(inputs, sample, view, preds->form, raw, &materialized,
                       &error)) {
        errors.push_back(sample.id + ": " + error);
        per_prediction.push_back(false);
        continue;
      }
      bool ok = false;
      try {
        ok = judge(view, materialized);
      } catch (const std::exception& e) {
        errors.push_back(sample.id + ": " + e.what());
        ok = false;
      }
      per_prediction.push_back(ok);
    }
  } else if (!view.valid) {
    errors.push_back(view.error);
  }

  for (int k : ks) {
    bool any = false;
    for (int i = 0; i < k && i < static_cast<int>(per_prediction.size());
         ++i) {
      any = any || per_prediction[i];
    }
    (exact ? score.exact_at : score.pass_at)[k] = any;
  }
  return score;
}

template <typename Judge>
EvalResult run_eval(const EvalInputs& inputs, bool exact, Judge&& judge) {
  EvalResult result;
  std::vector<int> ks = inputs.ks;
  std::sort(ks.begin(), ks.end());
  for (const auto& sample : inputs.samples) {
    result.per_sample.push_back(
        score_sample(inputs, sample, ks, exact, judge, result.errors));
  }
  aggregate(result, ks, exact);
  return result;
}

}  // namespace

EvalResult pass_at_k(const EvalInputs& inputs, Analyzer& analyzer) {
  return run_eval(inputs, /*exact=*/false,
                  [&](const ScoringView& view, const SourceText& pred) {
                    return does_fix(analyzer, pred, view.original,
                                    view.target) &&
                           no_new_issues(analyzer, pred, view.original);
                  });
}

EvalResult pass_at_k(const EvalInputs& inputs, const AnalyzerFactory& factory,
                     int workers) {
  if (workers <= 1 || inputs.samples.size() <= 1) {
    auto analyzer = factory();
    return pass_at_k(inputs, *analyzer);
  }
  EvalResult result;
  std::vector<int> ks = inputs.ks;
  std::sort(ks.begin(), ks.end());
  result.per_sample.resize(inputs.samples.size());
  std::vector<std::vector<std::string>> errors(inputs.samples.size());

  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  int n_workers = std::min<int>(workers, static_cast<int>(inputs.samples.size()));
  pool.reserve(static_cast<size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      auto analyzer = factory();
      auto judge = [&](const ScoringView& view, const SourceText& pred) {
        return does_fix(*analyzer, pred, view.original, view.target) &&
               no_new_issues(*analyzer, pred, view.original);
      };
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= inputs.samples.size()) return;
        result.per_sample[i] = score_sample(inputs, inputs.samples[i], ks,
                                            /*exact=*/false, judge, errors[i]);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& chunk : errors) {
    for (auto& e : chunk) result.errors.push_back(std::move(e));
  }
  aggregate(result, ks, /*exact=*/false);
  return result;
}

EvalResult exact_match_at_k(const EvalInputs& inputs) {
  return run_eval(inputs, /*exact=*/true,
                  [](const ScoringView& view, const SourceText& pred) {
                    return normalize_for_match(pred) ==
                           normalize_for_match(view.gold);
                  });
}

std::string render_eval_table(const EvalResult& pass, const EvalResult& exact,
                              const std::vector<int>& ks) {
  static const char* kCategories[] = {"AST", "Local", "FileWide",
                                      "SecurityLocal", "SecurityFlow",
                                      "overall"};
  std::ostringstream out;
  out << std::left << std::setw(15) << "Category";
  for (int k : ks) out << std::right << std::setw(10) << ("Pass@" + std::to_string(k));
  for (int k : ks) out << std::right << std::setw(10) << ("EM@" + std::to_string(k));
  out << '\n';
  auto cell = [&](const std::map<std::string, std::map<int, double>>& agg,
                  const std::string& cat, int k) {
    auto it = agg.find(cat);
    if (it == agg.end() || !it->second.count(k)) return std::string("-");
    std::ostringstream v;
    v << std::fixed << std::setprecision(2) << it->second.at(k) * 100.0;
    return v.str();
  };
  for (const char* cat : kCategories) {
    bool has = pass.pass_aggregate.count(cat) || exact.exact_aggregate.count(cat);
    if (!has && std::string(cat) != "overall") continue;
    out << std::left << std::setw(15) << cat;
    for (int k : ks) {
      out << std::right << std::setw(10) << cell(pass.pass_aggregate, cat, k);
    }
    for (int k : ks) {
      out << std::right << std::setw(10) << cell(exact.exact_aggregate, cat, k);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace snipfix
