#include "snipfix/prompt.hpp"

#include <chrono>
#include <cstdlib>
#include <future>
#include <random>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "snipfix/errors.hpp"

namespace snipfix {

using json = nlohmann::json;

namespace {

constexpr const char* kSystemBase =
    "Assistant is a code assistant designed to fix issues in given code "
    "snippets. Instructions: Do not generate additional text or code. Output "
    "only the fixed code snippet. Do not generate explanations, comments, "
    "notes.";

constexpr const char* kReductionNote =
    " Note that the code we provide is incomplete, it is intentionally "
    "reduced to a smaller snippet, do not try to complete it in anyway. "
    "Leave evertything as it is and just apply the changes related to the "
    "fix.";

std::string user_turn(const std::string& rule, const std::string& description,
                      const std::string& code) {
  return "Generate the fixed code for the bug " + rule +
         " with the error message " + description + ".\n" + code;
}

}  // namespace

PromptBundle build_prompt(
    const std::string& rule, const std::string& description,
    const std::vector<std::pair<std::string, std::string>>& shots,
    const std::string& query_code, bool include_reduction_note) {
  PromptBundle bundle;
  bundle.system = kSystemBase;
  if (include_reduction_note) bundle.system += kReductionNote;
  bundle.rule = rule;
  bundle.description = description;
  bundle.query_code = query_code;
  bundle.shots = shots;
  for (const auto& [pre, post] : shots) {
    bundle.turns.push_back({"user", user_turn(rule, description, pre)});
    bundle.turns.push_back({"assistant", post});
  }
  bundle.turns.push_back({"user", user_turn(rule, description, query_code)});
  return bundle;
}

std::vector<std::pair<std::string, std::string>> pick_shots(
    const std::vector<FixSample>& train, const std::string& rule, int count,
    uint64_t seed) {
  if (count <= 0) return {};
  std::vector<const FixSample*> pool;
  for (const auto& s : train) {
    if (s.split == Split::Train && s.rule == rule) pool.push_back(&s);
  }
  if (pool.empty()) {
    throw NoShotsAvailableError("train split has no sample for rule " + rule);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, std::string>> out;
  int want = std::min<int>(count, static_cast<int>(pool.size()));
  for (int i = 0; i < want; ++i) {
    // modulo keeps draws identical across standard libraries
    size_t idx = static_cast<size_t>(rng() % pool.size());
    const FixSample* s = pool[idx];
    pool.erase(pool.begin() + static_cast<long>(idx));
    out.emplace_back(s->pre.to_bytes(), s->post.to_bytes());
  }
  return out;
}

ModelEndpoint ModelEndpoint::from_env() {
  ModelEndpoint e;
  if (const char* url = std::getenv("MODEL_URL")) e.url = url;
  if (const char* key = std::getenv("MODEL_KEY")) e.key = key;
  if (const char* name = std::getenv("MODEL_NAME")) e.name = name;
  if (e.url.empty()) {
    throw std::invalid_argument("MODEL_URL is not configured");
  }
  return e;
}

namespace {

struct SplitUrl {
  std::string base;  // scheme://host:port
  std::string path;  // /v1/...
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint url needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/v1/chat/completions"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

json bundle_messages(const PromptBundle& bundle) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", bundle.system}});
  for (const auto& turn : bundle.turns) {
    messages.push_back({{"role", turn.role}, {"content", turn.content}});
  }
  return messages;
}

std::vector<std::string> one_request(const SplitUrl& url,
                                     const ModelEndpoint& endpoint,
                                     const PromptBundle& bundle, int n,
                                     double temperature, int max_retries) {
  json body = {
      {"model", endpoint.name},
      {"messages", bundle_messages(bundle)},
      {"n", n},
      {"temperature", temperature},
  };
  const std::string payload = body.dump();

  int attempts = 0;
  while (true) {
    httplib::Client client(url.base);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!endpoint.key.empty()) {
      headers.emplace("Authorization", "Bearer " + endpoint.key);
    }
    auto res = client.Post(url.path, headers, payload, "application/json");

    if (res && res->status == 429) {
      if (attempts >= max_retries) {
        throw RateLimitedError("model service rate limited");
      }
      ++attempts;
      int wait_s = 1;
      if (res->has_header("Retry-After")) {
        try {
          wait_s = std::stoi(res->get_header_value("Retry-After"));
        } catch (const std::exception&) {
        }
      }
      std::this_thread::sleep_for(
          std::chrono::milliseconds(std::min(wait_s, 5) * 1000));
      continue;
    }
    if (!res || res->status >= 500) {
      if (attempts >= max_retries) {
        throw TransportError("model service unreachable: " + url.base);
      }
      ++attempts;
      continue;
    }
    if (res->status != 200) {
      throw TransportError("model service returned status " +
                           std::to_string(res->status));
    }
    json parsed;
    try {
      parsed = json::parse(res->body);
    } catch (const json::exception&) {
      throw TransportError("model service returned malformed JSON");
    }
    if (!parsed.contains("choices") || !parsed["choices"].is_array()) {
      throw TransportError("model response has no choices");
    }
    std::vector<std::string> out;
    for (const auto& choice : parsed["choices"]) {
      out.push_back(choice.at("message").at("content").get<std::string>());
    }
    return out;
  }
}

}  // namespace

std::vector<std::string> complete(const ModelEndpoint& endpoint,
                                  const PromptBundle& bundle,
                                  const CompletionOptions& options) {
  if (options.n < 1) {
    throw std::invalid_argument("completion count must be >= 1");
  }
  SplitUrl url = split_url(endpoint.url);

  std::vector<std::string> results = one_request(
      url, endpoint, bundle, options.n, options.temperature,
      options.max_retries);

  // Top up with parallel single-shot requests when the service returned
  // fewer choices than asked for.
  while (static_cast<int>(results.size()) < options.n) {
    int missing = options.n - static_cast<int>(results.size());
    int batch = std::min(missing, std::max(1, options.max_concurrency));
    std::vector<std::future<std::vector<std::string>>> futures;
    futures.reserve(static_cast<size_t>(batch));
    for (int i = 0; i < batch; ++i) {
      futures.push_back(std::async(std::launch::async, [&]() {
        return one_request(url, endpoint, bundle, 1, options.temperature,
                           options.max_retries);
      }));
    }
    for (auto& f : futures) {
      auto chunk = f.get();
      for (auto& c : chunk) {
        if (static_cast<int>(results.size()) < options.n) {
          results.push_back(std::move(c));
        }
      }
    }
  }
  results.resize(static_cast<size_t>(options.n));
  return results;
}

}  // namespace snipfix
