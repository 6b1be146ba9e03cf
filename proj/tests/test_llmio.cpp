#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "dpf/core/text.hpp"
#include "dpf/llmio/client.hpp"
#include "dpf/llmio/http_backend.hpp"
#include "dpf/llmio/mock_backend.hpp"
#include "dpf/llmio/tags.hpp"
#include "dpf/math/stats.hpp"
#include "dpf/util/rng.hpp"
#include "support.hpp"

using namespace dpf;
using namespace dpf::llmio;
using namespace std::chrono_literals;

namespace {

ChatRequest simple_request(std::string text = "hello", std::uint64_t seed = 1) {
  ChatRequest r;
  r.messages.push_back({MessageRole::user, std::move(text)});
  r.sampling.seed = seed;
  r.tag = "misc";
  return r;
}

const char* kOkBody = R"({"model":"srv-model","choices":[{"message":{"role":"assistant","content":"fine"},)"
                      R"("logprobs":{"content":[{"token":"fine","logprob":-0.5}]}}],)"
                      R"("usage":{"prompt_tokens":3,"completion_tokens":1}})";

// Local HTTP server on an ephemeral port, stopped on destruction.
class FakeServer {
public:
  FakeServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

BackendConfig http_config(const std::string& endpoint, const std::string& key_env = "") {
  BackendConfig c;
  c.kind = BackendKind::http;
  c.endpoint = endpoint;
  c.model = "srv-model";
  c.api_key_env = key_env;
  c.timeout = 5s;
  return c;
}

struct RecordingSleeper {
  std::shared_ptr<std::vector<std::chrono::milliseconds>> waits = std::make_shared<std::vector<std::chrono::milliseconds>>();
  Sleeper fn() {
    auto w = waits;
    return [w](std::chrono::milliseconds d) { w->push_back(d); };
  }
};

}  // namespace

TEST(Http, RetriesThroughTwo429sAndSucceedsOnAttemptThree) {
  FakeServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 429;
      res.set_content("{\"error\":\"slow down\"}", "application/json");
      return;
    }
    res.set_content(kOkBody, "application/json");
  });
  RecordingSleeper sleeper;
  auto cfg = http_config(srv.endpoint());
  cfg.retry.base_backoff = 100ms;
  cfg.retry.jitter = 0.0;
  Client client(cfg, nullptr, sleeper.fn());
  auto r = client.chat(simple_request());
  EXPECT_EQ(r.text, "fine");
  EXPECT_EQ(r.attempts, 3u);
  EXPECT_EQ(hits.load(), 3);
  ASSERT_EQ(sleeper.waits->size(), 2u);
  EXPECT_EQ((*sleeper.waits)[0], 100ms);
  EXPECT_EQ((*sleeper.waits)[1], 200ms);
  ASSERT_TRUE(r.token_logprobs);
  EXPECT_EQ(*r.token_logprobs, std::vector<double>{-0.5});
}

TEST(Http, HonoursRetryAfter) {
  FakeServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits == 1) {
      res.status = 503;
      res.set_header("Retry-After", "3");
      return;
    }
    res.set_content(kOkBody, "application/json");
  });
  RecordingSleeper sleeper;
  Client client(http_config(srv.endpoint()), nullptr, sleeper.fn());
  client.chat(simple_request());
  ASSERT_EQ(sleeper.waits->size(), 1u);
  EXPECT_EQ((*sleeper.waits)[0], 3000ms);
}

TEST(Http, GivesUpAfterMaxAttempts) {
  FakeServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  RecordingSleeper sleeper;
  Client client(http_config(srv.endpoint()), nullptr, sleeper.fn());
  EXPECT_THROW(client.chat(simple_request()), ExhaustedRetries);
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, UnauthorizedIsNotRetried) {
  FakeServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  RecordingSleeper sleeper;
  Client client(http_config(srv.endpoint()), nullptr, sleeper.fn());
  EXPECT_THROW(client.chat(simple_request()), AuthError);
  EXPECT_EQ(hits.load(), 1);
  EXPECT_TRUE(sleeper.waits->empty());
}

TEST(Http, MalformedBodyAndRejectedRequest) {
  FakeServer srv;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("bad-request") != std::string::npos) {
      res.status = 400;
      res.set_content("{\"error\":\"no\"}", "application/json");
      return;
    }
    res.set_content("this is not json", "text/plain");
  });
  Client client(http_config(srv.endpoint()), nullptr, RecordingSleeper{}.fn());
  EXPECT_THROW(client.chat(simple_request()), MalformedResponse);
  EXPECT_THROW(client.chat(simple_request("bad-request")), RequestRejected);
}

TEST(Http, SendsBearerKeyFromEnvironment) {
  FakeServer srv;
  std::string seen_auth, seen_body;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content(kOkBody, "application/json");
  });
  ::setenv("DPF_TEST_HTTP_KEY", "sk-test-123", 1);
  Client client(http_config(srv.endpoint(), "DPF_TEST_HTTP_KEY"), nullptr, RecordingSleeper{}.fn());
  client.chat(simple_request());
  EXPECT_EQ(seen_auth, "Bearer sk-test-123");
  auto body = nlohmann::json::parse(seen_body);
  EXPECT_EQ(body["model"], "srv-model");
  EXPECT_EQ(body["messages"][0]["content"], "hello");

  ::unsetenv("DPF_TEST_HTTP_KEY");
  EXPECT_THROW(client.chat(simple_request()), AuthError);
}

TEST(Http, Embeddings) {
  FakeServer srv;
  srv.server().Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    auto in = nlohmann::json::parse(req.body);
    nlohmann::json data = nlohmann::json::array();
    for (std::size_t i = 0; i < in["input"].size(); ++i) {
      data.push_back({{"index", i}, {"embedding", {1.0 * i, 1.0}}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
  Client client(http_config(srv.endpoint()), nullptr, RecordingSleeper{}.fn());
  auto v = client.embed({"a", "b"});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1], (std::vector<double>{1.0, 1.0}));
}

TEST(Http, ConfigNeverCarriesKeys) {
  nlohmann::json j{{"kind", "http"}, {"endpoint", "http://x/v1"}, {"api_key", "sk-oops"}};
  EXPECT_THROW(backend_config_from_json(j), std::invalid_argument);
  auto cfg = http_config("http://x/v1", "SOME_ENV");
  EXPECT_EQ(to_json(cfg).dump().find("sk-"), std::string::npos);
}

TEST(Mock, DeterministicPerRequest) {
  Client a(testkit::mock_config(9)), b(testkit::mock_config(9)), c(testkit::mock_config(10));
  auto req = simple_request("tell me something", 5);
  EXPECT_EQ(a.chat(req).text, b.chat(req).text);
  auto other = req;
  other.sampling.seed = 6;
  EXPECT_NE(a.chat(req).text, a.chat(other).text);
  EXPECT_NE(a.chat(req).text, c.chat(req).text);
}

TEST(Mock, JudgeAndEvalTurnFollowHints) {
  Client client(testkit::mock_config(1));
  auto req = simple_request("judge this");
  req.tag = tags::kJudge;
  req.hints = {{"pink", "Nike"}, {"response", "I love nike shoes"}};
  EXPECT_EQ(text::extract_verdict(client.chat(req).text), true);
  req.hints["response"] = "Adidas it is";
  EXPECT_EQ(text::extract_verdict(client.chat(req).text), false);
}

TEST(Mock, EmbeddingsAreUnitAndPinnable) {
  auto backend = std::make_shared<MockBackend>(testkit::mock_config(1));
  backend->pin_embedding("rugby", {1.0, 0.0});
  Client client(testkit::mock_config(1), backend);
  auto v = client.embed({"hello world", "Hello   World", "Rugby"});
  double norm = 0;
  for (double x : v[0]) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_EQ(v[0], v[1]);
  ASSERT_EQ(v[2].size(), v[0].size());
  EXPECT_EQ(v[2][0], 1.0);
  EXPECT_EQ(std::count(v[2].begin(), v[2].end(), 0.0), static_cast<std::ptrdiff_t>(v[2].size() - 1));
  std::vector<double> too_long(65, 0.1);
  EXPECT_THROW(backend->pin_embedding("x", too_long), std::invalid_argument);
}

TEST(Mock, ConcurrencyNeverExceedsBound) {
  auto cfg = testkit::mock_config(3);
  cfg.max_concurrency = 3;
  cfg.mock.latency = 5ms;
  auto backend = std::make_shared<MockBackend>(cfg);
  Client client(cfg, backend);
  std::atomic<int> ok{0};
  std::vector<std::jthread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 6; ++i) {
        client.chat(simple_request("q" + std::to_string(t * 100 + i)));
        ++ok;
      }
    });
  }
  threads.clear();
  EXPECT_EQ(ok.load(), 48);
  EXPECT_LE(backend->max_in_flight(), 3u);
  EXPECT_GE(backend->max_in_flight(), 2u);
}

TEST(Mock, FailAfterCallsInjectsServerErrors) {
  auto cfg = testkit::mock_config(3);
  cfg.mock.fail_after_calls = 2;
  Client client(cfg, nullptr, RecordingSleeper{}.fn());
  client.chat(simple_request("a"));
  client.chat(simple_request("b"));
  EXPECT_THROW(client.chat(simple_request("c")), ExhaustedRetries);
}

TEST(Client, RatePacingSpacesRequestStarts) {
  auto cfg = testkit::mock_config(1);
  cfg.rate_limit_rpm = 600;  // one start every 100 ms
  RecordingSleeper sleeper;
  Client client(cfg, nullptr, sleeper.fn());
  for (int i = 0; i < 3; ++i) client.chat(simple_request("r" + std::to_string(i)));
  ASSERT_EQ(sleeper.waits->size(), 2u);
  EXPECT_GT((*sleeper.waits)[0], 50ms);
  EXPECT_LE((*sleeper.waits)[1], 200ms);
}

TEST(BestOfN, PicksLowestPerplexityAndFallsBack) {
  auto backend = std::make_shared<MockBackend>(testkit::mock_config(1));
  Rng rng(17);
  std::vector<std::vector<double>> scripted;
  backend->set_responder([&](const ChatRequest& req, std::size_t) -> std::optional<ChatResponse> {
    ChatResponse r;
    auto i = static_cast<std::size_t>(*req.sampling.seed - 1000);
    r.text = "candidate " + std::to_string(i);
    r.token_logprobs = scripted.at(i);
    r.model = "mock";
    return r;
  });
  Client client(testkit::mock_config(1), backend);
  auto req = simple_request("x", 1000);
  req.want_logprobs = true;
  int correct = 0;
  for (int trial = 0; trial < 100; ++trial) {
    scripted.clear();
    std::size_t best = 0;
    double best_ppl = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> lp(1 + rng.index(20));
      for (auto& x : lp) x = -rng.uniform(0.01, 3.0);
      double ppl = math::perplexity(lp);
      if (i == 0 || ppl < best_ppl) {
        best = i;
        best_ppl = ppl;
      }
      scripted.push_back(lp);
    }
    auto r = client.best_of_n(req, 3);
    correct += r.text == "candidate " + std::to_string(best);
  }
  EXPECT_EQ(correct, 100);

  scripted = {{-0.1}, {}};
  auto r = client.best_of_n(req, 2);
  EXPECT_EQ(r.text, "candidate 0");
  ASSERT_TRUE(r.selection);
  EXPECT_TRUE(r.selection->logprobs_fallback);
}

TEST(BestOfN, SingleCandidateEqualsChat) {
  Client client(testkit::mock_config(4));
  auto req = simple_request("plan a dialogue", 77);
  req.want_logprobs = true;
  auto plain = client.chat(req);
  auto best = client.best_of_n(req, 1);
  EXPECT_EQ(best.text, plain.text);
  EXPECT_EQ(best.token_logprobs, plain.token_logprobs);
  best.selection.reset();
  EXPECT_EQ(to_json(best).dump(), to_json(plain).dump());
}
