#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "snipfix/dataset.hpp"

namespace snipfix {

struct PromptTurn {
  std::string role;  // "user" | "assistant"
  std::string content;

  bool operator==(const PromptTurn&) const = default;
};

/// A ready-to-send conversation: system text plus alternating user/assistant
/// turns ending with the user query.
struct PromptBundle {
  std::string system;
  std::vector<PromptTurn> turns;
  std::string rule;
  std::string description;
  std::string query_code;
  std::vector<std::pair<std::string, std::string>> shots;  // (pre, post)
};

/// Build the fixed conversation shape. Each shot becomes a user/assistant
/// exchange; the query is the final user turn. When include_reduction_note
/// is false the system text stops before the snippet-incompleteness note
/// (used when feeding whole files).
PromptBundle build_prompt(const std::string& rule,
                          const std::string& description,
                          const std::vector<std::pair<std::string, std::string>>& shots,
                          const std::string& query_code,
                          bool include_reduction_note);

/// Seeded choice of few-shot examples: samples from the train split with the
/// same rule, without replacement, in draw order. Throws
/// NoShotsAvailableError when `count` > 0 and no such sample exists.
std::vector<std::pair<std::string, std::string>> pick_shots(
    const std::vector<FixSample>& train, const std::string& rule, int count,
    uint64_t seed);

/// Model service endpoint, configured through MODEL_URL / MODEL_KEY /
/// MODEL_NAME.
struct ModelEndpoint {
  std::string url;
  std::string key;
  std::string name;

  static ModelEndpoint from_env();
};

struct CompletionOptions {
  int n = 1;
  double temperature = 0.2;
  int max_retries = 2;      // transport errors only; content is never retried
  int max_concurrency = 4;  // bounded parallel top-up requests
};

/// Request `n` completions in rank order. Honors Retry-After on 429 up to
/// the retry budget (then RateLimitedError); other transport failures retry
/// up to the same budget (then TransportError).
std::vector<std::string> complete(const ModelEndpoint& endpoint,
                                  const PromptBundle& bundle,
                                  const CompletionOptions& options);

}  // namespace snipfix
