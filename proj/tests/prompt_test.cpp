#include "snipfix/prompt.hpp"

#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "snipfix/errors.hpp"

namespace snipfix {
namespace {

using ordered_json = nlohmann::ordered_json;

const char* kRule = "PT";
const char* kDescription = "Path traversal via unsanitized request data";
const char* kShotPre =
    "function go(req, res) {\n  res.sendFile(req.params.file);\n}\n";
const char* kShotPost =
    "function go(req, res) {\n  res.sendFile(path.basename(req.params.file));\n}\n";
const char* kQuery =
    "const fs = require('fs');\nfs.createWriteStream(req.query.name);\n";

std::string render(const PromptBundle& bundle) {
  ordered_json j;
  j["system"] = bundle.system;
  ordered_json turns = ordered_json::array();
  for (const auto& t : bundle.turns) {
    turns.push_back(ordered_json{{"role", t.role}, {"content", t.content}});
  }
  j["turns"] = std::move(turns);
  return j.dump() + "\n";
}

TEST(BuildPrompt, ZeroShotsGivesSystemPlusOneUserTurn) {
  PromptBundle bundle = build_prompt(kRule, kDescription, {}, kQuery, true);
  ASSERT_EQ(bundle.turns.size(), 1u);
  EXPECT_EQ(bundle.turns[0].role, "user");
  EXPECT_NE(bundle.system.find("code assistant"), std::string::npos);
}

TEST(BuildPrompt, TwoShotsGiveFiveAlternatingTurnsEndingWithUser) {
  std::vector<std::pair<std::string, std::string>> shots = {
      {kShotPre, kShotPost}, {kShotPre, kShotPost}};
  PromptBundle bundle = build_prompt(kRule, kDescription, shots, kQuery, true);
  ASSERT_EQ(bundle.turns.size(), 5u);
  for (size_t i = 0; i < bundle.turns.size(); ++i) {
    EXPECT_EQ(bundle.turns[i].role, i % 2 == 0 ? "user" : "assistant");
  }
  EXPECT_EQ(bundle.turns.back().role, "user");
  // one assistant turn per shot
  int assistant_turns = 0;
  for (const auto& t : bundle.turns) {
    if (t.role == "assistant") ++assistant_turns;
  }
  EXPECT_EQ(assistant_turns, 2);
}

TEST(BuildPrompt, MatchesTheTranscribedGoldenWithTheNote) {
  PromptBundle bundle = build_prompt(kRule, kDescription,
                                     {{kShotPre, kShotPost}}, kQuery, true);
  EXPECT_EQ(render(bundle),
            testing::fixture_bytes("prompt_golden_with_note.json"));
}

TEST(BuildPrompt, MatchesTheTranscribedGoldenWithoutTheNote) {
  PromptBundle bundle = build_prompt(kRule, kDescription, {}, kQuery, false);
  EXPECT_EQ(render(bundle),
            testing::fixture_bytes("prompt_golden_without_note.json"));
}

FixSample train_sample(const std::string& id, const std::string& rule,
                       Split split) {
  FixSample s;
  s.id = id;
  s.repo = "repo/" + id;
  s.license_class =
      split == Split::Test ? LicenseClass::Restrictive : LicenseClass::Permissive;
  s.split = split;
  s.rule = rule;
  s.category = RuleCategory::SecurityFlow;
  s.message = "m";
  s.line = 1;
  s.flavor = Flavor::CodeReduced;
  s.pre = SourceText::from_bytes("pre " + id + "\n");
  s.post = SourceText::from_bytes("post " + id + "\n");
  s.mapping = LineMapping::identity(1);
  return s;
}

TEST(PickShots, SeededSelectionIsDeterministicAndRuleScoped) {
  std::vector<FixSample> train;
  for (int i = 0; i < 6; ++i) {
    train.push_back(train_sample("pt" + std::to_string(i), "PT", Split::Train));
  }
  train.push_back(train_sample("other", "BannedCall", Split::Train));
  train.push_back(train_sample("test-only", "PT", Split::Test));

  auto a = pick_shots(train, "PT", 2, 42);
  auto b = pick_shots(train, "PT", 2, 42);
  EXPECT_EQ(a, b);
  auto c = pick_shots(train, "PT", 2, 43);
  EXPECT_EQ(c.size(), 2u);

  for (const auto& [pre, post] : a) {
    EXPECT_NE(pre.find("pre pt"), std::string::npos);
    EXPECT_EQ(pre.find("test-only"), std::string::npos);
  }
  EXPECT_THROW(pick_shots(train, "NoSuchRule", 1, 1), NoShotsAvailableError);
  EXPECT_TRUE(pick_shots(train, "NoSuchRule", 0, 1).empty());
}

// ---------------------------------------------------------------------------
// model-service adapter against a local stub server
// ---------------------------------------------------------------------------

class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  ModelEndpoint endpoint() const {
    ModelEndpoint e;
    e.url = "http://127.0.0.1:" + std::to_string(port_);
    e.key = "test-key";
    e.name = "stub-model";
    return e;
  }

  int requests_seen = 0;
  int fail_first_n = 0;          // respond 500 to the first N requests
  int rate_limit_first_n = 0;    // respond 429 to the first N requests
  std::vector<std::string> canned = {"reply"};

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    ++requests_seen;
    last_body = req.body;
    if (rate_limit_first_n > 0) {
      --rate_limit_first_n;
      res.status = 429;
      res.set_header("Retry-After", "0");
      return;
    }
    if (fail_first_n > 0) {
      --fail_first_n;
      res.status = 500;
      return;
    }
    auto body = nlohmann::json::parse(req.body);
    int n = body.value("n", 1);
    nlohmann::json choices = nlohmann::json::array();
    for (int i = 0; i < n && i < static_cast<int>(canned.size()); ++i) {
      choices.push_back(
          {{"message", {{"role", "assistant"}, {"content", canned[i]}}}});
    }
    res.set_content(nlohmann::json{{"choices", choices}}.dump(),
                    "application/json");
  }

 public:
  std::string last_body;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST(Complete, ReturnsRankedCompletionsAndSendsTheConversation) {
  StubServer stub;
  stub.canned = {"first", "second", "third"};
  PromptBundle bundle = build_prompt(kRule, kDescription,
                                     {{kShotPre, kShotPost}}, kQuery, true);
  CompletionOptions options;
  options.n = 3;
  auto out = complete(stub.endpoint(), bundle, options);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], "first");
  EXPECT_EQ(out[2], "third");

  auto body = nlohmann::json::parse(stub.last_body);
  EXPECT_EQ(body["model"], "stub-model");
  EXPECT_EQ(body["temperature"], 0.2);
  ASSERT_EQ(body["messages"].size(), 4u);  // system + user/assistant/user
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][0]["content"], bundle.system);
  EXPECT_EQ(body["messages"][3]["content"], bundle.turns.back().content);
}

TEST(Complete, ReplaysRecordedFixtureByteExact) {
  StubServer stub;
  stub.canned = {std::string("fixed code\nwith two lines\n")};
  PromptBundle bundle = build_prompt(kRule, kDescription, {}, kQuery, true);
  auto out = complete(stub.endpoint(), bundle, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], "fixed code\nwith two lines\n");
  auto again = complete(stub.endpoint(), bundle, {});
  EXPECT_EQ(out, again);
}

TEST(Complete, ZeroCompletionsIsAPreconditionError) {
  StubServer stub;
  PromptBundle bundle = build_prompt(kRule, kDescription, {}, kQuery, true);
  CompletionOptions options;
  options.n = 0;
  EXPECT_THROW(complete(stub.endpoint(), bundle, options),
               std::invalid_argument);
}

TEST(Complete, RetriesTransportErrorsThenSucceeds) {
  StubServer stub;
  stub.fail_first_n = 2;
  PromptBundle bundle = build_prompt(kRule, kDescription, {}, kQuery, true);
  CompletionOptions options;
  options.max_retries = 2;
  auto out = complete(stub.endpoint(), bundle, options);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(stub.requests_seen, 3);
}

TEST(Complete, ExhaustedRetriesRaiseTransportError) {
  StubServer stub;
  stub.fail_first_n = 10;
  PromptBundle bundle = build_prompt(kRule, kDescription, {}, kQuery, true);
  CompletionOptions options;
  options.max_retries = 1;
  EXPECT_THROW(complete(stub.endpoint(), bundle, options), TransportError);
}

TEST(Complete, RateLimitingIsHonoredThenGivesUp) {
  StubServer stub;
  stub.rate_limit_first_n = 1;
  PromptBundle bundle = build_prompt(kRule, kDescription, {}, kQuery, true);
  CompletionOptions options;
  options.max_retries = 2;
  auto out = complete(stub.endpoint(), bundle, options);
  EXPECT_EQ(out.size(), 1u);

  StubServer strict;
  strict.rate_limit_first_n = 10;
  CompletionOptions tight;
  tight.max_retries = 1;
  EXPECT_THROW(complete(strict.endpoint(), bundle, tight), RateLimitedError);
}

}  // namespace
}  // namespace snipfix
