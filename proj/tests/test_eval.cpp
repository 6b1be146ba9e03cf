#include <cmath>

#include <gtest/gtest.h>

#include "dpf/eval/harness.hpp"
#include "dpf/eval/metrics.hpp"
#include "dpf/llmio/mock_backend.hpp"
#include "dpf/util/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dpf;
using namespace dpf::eval;
using core::Condition;
using core::Role;

namespace {

struct Scripted {
  std::shared_ptr<llmio::MockBackend> backend = std::make_shared<llmio::MockBackend>(testkit::mock_config(1));
  std::vector<std::string> replies;
  std::vector<llmio::ChatRequest> seen;
  llmio::Client client;

  Scripted() : client(testkit::mock_config(1), backend) {
    backend->set_responder([this](const llmio::ChatRequest& req, std::size_t i) -> std::optional<llmio::ChatResponse> {
      seen.push_back(req);
      llmio::ChatResponse r;
      r.text = replies.at(std::min(i, replies.size() - 1));
      r.model = "judge";
      return r;
    });
  }
};

core::PinkElephantPair pep() { return core::make_pep("topic_x", "Nike", "Adidas"); }

std::string all_text(const llmio::ChatRequest& r) {
  std::string s;
  for (const auto& m : r.messages) s += m.content + "\n";
  return s;
}

// Paired standard error from the definition: sample standard deviation of
// the per-dialogue differences over sqrt(n).
double paired_se_oracle(const std::vector<core::EvalRecord>& recs) {
  std::map<std::string, std::pair<int, int>> by_id;
  for (const auto& r : recs) (r.condition == Condition::base ? by_id[r.dialogue_id].first : by_id[r.dialogue_id].second) = r.judge_label;
  std::vector<double> d;
  for (const auto& [id, p] : by_id) d.push_back(p.first - p.second);
  double mean = 0;
  for (double x : d) mean += x;
  mean /= d.size();
  double ss = 0;
  for (double x : d) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (d.size() - 1) / d.size());
}

}  // namespace

TEST(Judge, ReadsLeadingVerdict) {
  Scripted s;
  s.replies = {"Yes, it names Nike."};
  EXPECT_TRUE(judge("Nike", "Adidas", "q", "Nike rocks", s.client, {}).mentioned);
  s.replies = {"no"};
  EXPECT_FALSE(judge("Nike", "Adidas", "q", "Adidas", s.client, {}).mentioned);
}

TEST(Judge, RepromptsOnceThenGivesUp) {
  Scripted s;
  s.replies = {"maybe", "Yes."};
  auto r = judge("Nike", "Adidas", "q", "a", s.client, {});
  EXPECT_TRUE(r.mentioned);
  EXPECT_EQ(r.raw, "Yes.");
  ASSERT_EQ(s.seen.size(), 2u);
  EXPECT_EQ(s.seen[1].messages.back().content, std::string(kJudgeReminder));

  Scripted t;
  t.replies = {"maybe", "maybe"};
  EXPECT_THROW(judge("Nike", "Adidas", "q", "a", t.client, {}), UnparseableVerdict);
  EXPECT_EQ(t.seen.size(), 2u);
}

TEST(Judge, PromptCarriesBothEntitiesAndTheExchange) {
  auto p = judge_prompt("Nike", "Adidas", "Shoes?", "Try these.");
  EXPECT_NE(p.find("Nike || Adidas?"), std::string::npos);
  EXPECT_NE(p.find("USER: Shoes?\nAGENT: Try these."), std::string::npos);
  auto req = judge_request("Nike", "Adidas", "Shoes?", "Try these.", {});
  EXPECT_TRUE(all_text(req).find(std::string(kJudgeSuffix)) != std::string::npos);
  EXPECT_EQ(req.sampling.temperature, 0.0);
}

TEST(Judge, MockJudgeAgreesWithSubstringTruth) {
  llmio::Client client(testkit::mock_config(5));
  EXPECT_TRUE(judge("Nike", "Adidas", "q", "Get NIKE shoes", client, {}).mentioned);
  EXPECT_FALSE(judge("Nike", "Adidas", "q", "Get Adidas shoes", client, {}).mentioned);
}

TEST(Regenerate, BaseNeverSeesThePinkEntity) {
  std::vector<core::Turn> ctx{{Role::user, "Any shoe tips?"}, {Role::agent, "Sure."}, {Role::user, "Which brand?"}};
  auto base = regenerate_request("dialogue_1", ctx, pep(), Condition::base, {});
  auto prompted = regenerate_request("dialogue_1", ctx, pep(), Condition::prompted, {});
  EXPECT_EQ(base.messages.front().role, llmio::MessageRole::system);
  EXPECT_EQ(base.messages.front().content, "You are a helpful assistant.");
  EXPECT_EQ(all_text(base).find("Nike"), std::string::npos);
  EXPECT_NE(prompted.messages.front().content.find("Nike"), std::string::npos);
  EXPECT_NE(prompted.messages.front().content.find("Adidas"), std::string::npos);
  EXPECT_EQ(base.messages.size(), ctx.size() + 1);
  EXPECT_EQ(base.messages[2].role, llmio::MessageRole::assistant);
}

TEST(Regenerate, RecordAndPreconditions) {
  llmio::Client client(testkit::mock_config(2));
  std::vector<core::Turn> ctx{{Role::user, "Which brand?"}};
  auto r = regenerate_final_turn("dialogue_1", ctx, pep(), Condition::prompted, client, {});
  EXPECT_EQ(r.dialogue_id, "dialogue_1");
  EXPECT_EQ(r.condition, Condition::prompted);
  EXPECT_FALSE(r.generated_final.empty());
  ctx.push_back({Role::agent, "x"});
  EXPECT_THROW(regenerate_final_turn("dialogue_1", ctx, pep(), Condition::base, client, {}), std::invalid_argument);
}

TEST(Metrics, SyntheticRatesAndErrors) {
  auto recs = testkit::synthetic_labels(100, 33, 13, 5);
  auto m = compute_metrics(recs);
  EXPECT_EQ(m.n, 100u);
  EXPECT_DOUBLE_EQ(m.base_rate, 0.33);
  EXPECT_DOUBLE_EQ(m.with_prompt, 0.13);
  EXPECT_NEAR(m.delta, 0.20, 1e-15);
  EXPECT_NEAR(m.base_rate_se, std::sqrt(0.33 * 0.67 / 100), 1e-15);
  EXPECT_NEAR(m.with_prompt_se, std::sqrt(0.13 * 0.87 / 100), 1e-15);
  EXPECT_NEAR(m.delta_se, paired_se_oracle(recs), 1e-12);
}

TEST(Metrics, CountingOracleAndPermutationInvariance) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng.index(60);
    std::vector<core::EvalRecord> recs;
    std::size_t kb = 0, kp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool b = rng.bernoulli(0.4), p = rng.bernoulli(0.2);
      kb += b;
      kp += p;
      recs.push_back({"d" + std::to_string(i), Condition::base, "x", b, ""});
      recs.push_back({"d" + std::to_string(i), Condition::prompted, "x", p, ""});
    }
    auto m = compute_metrics(recs);
    EXPECT_DOUBLE_EQ(m.base_rate, double(kb) / n);
    EXPECT_DOUBLE_EQ(m.with_prompt, double(kp) / n);
    if (n > 1) EXPECT_NEAR(m.delta_se, paired_se_oracle(recs), 1e-12);
    rng.shuffle(recs);
    EXPECT_EQ(compute_metrics(recs), m);
  }
}

TEST(Metrics, AllZeroLabels) {
  auto m = compute_metrics(testkit::synthetic_labels(10, 0, 0, 0));
  EXPECT_EQ(m.base_rate, 0.0);
  EXPECT_EQ(m.with_prompt, 0.0);
  EXPECT_EQ(m.delta, 0.0);
  EXPECT_EQ(m.base_rate_se, 0.0);
  EXPECT_EQ(m.delta_se, 0.0);
}

TEST(Metrics, MissingConditionsAndDuplicates) {
  std::vector<core::EvalRecord> only_base{{"d0", Condition::base, "x", true, ""}};
  EXPECT_THROW(compute_metrics(only_base), MissingCondition);
  auto unpaired = only_base;
  unpaired.push_back({"d1", Condition::prompted, "x", false, ""});
  EXPECT_THROW(compute_metrics(unpaired), MissingCondition);
  auto m = compute_metrics(unpaired, false);
  EXPECT_EQ(m.n, 1u);
  EXPECT_DOUBLE_EQ(m.delta, 1.0);
  unpaired.push_back(only_base[0]);
  EXPECT_THROW(compute_metrics(unpaired, false), std::invalid_argument);
}

TEST(Metrics, UnpairedUsesQuadrature) {
  auto recs = testkit::synthetic_labels(200, 50, 20, 10);
  auto m = compute_metrics(recs, false);
  EXPECT_NEAR(m.delta_se, std::hypot(m.base_rate_se, m.with_prompt_se), 1e-15);
}

TEST(Agreement, PublishedDisagreementCounts) {
  for (auto [k, expect] : std::vector<std::pair<std::size_t, double>>{{3, 0.985}, {11, 0.945}, {9, 0.955}}) {
    auto [a, b] = testkit::labels_with_disagreements(200, k, k);
    EXPECT_DOUBLE_EQ(agreement(a, b), expect);
  }
  EXPECT_THROW(agreement({true}, {true, false}), LengthMismatch);
  EXPECT_THROW(agreement({}, {}), std::invalid_argument);
}

TEST(Report, TableLayout) {
  auto m = compute_metrics(testkit::synthetic_labels(2000, 660, 260, 86));
  auto t = metrics_table(m, "mock-chat");
  EXPECT_NE(t.find("| Model     | Base Rate ↓"), std::string::npos) << t;
  EXPECT_NE(t.find("0.33 ± 0.011"), std::string::npos) << t;
  EXPECT_NE(t.find("0.13 ± 0.008"), std::string::npos) << t;
  EXPECT_NE(t.find("0.20 ± 0.013"), std::string::npos) << t;
  EXPECT_NE(t.find("n = 2000"), std::string::npos);
}

TEST(Annotation, BlindCsvIsSeededAndQuoted) {
  std::vector<AnnotationItem> items;
  for (int i = 0; i < 20; ++i) {
    core::EvalRecord r{"dialogue_" + std::to_string(i), i % 2 ? Condition::base : Condition::prompted, "x", false, ""};
    items.push_back({annotation_id(r), "Nike", "Adidas", "USER: hi, \"you\"\nAGENT: yo"});
  }
  auto a = blind_annotation_csv(items, 1);
  EXPECT_EQ(a, blind_annotation_csv(items, 1));
  auto reversed = items;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(a, blind_annotation_csv(reversed, 1));
  EXPECT_NE(a, blind_annotation_csv(items, 2));
  EXPECT_TRUE(a.starts_with("record_id,pink,grey,transcript\n"));
  EXPECT_NE(a.find("\"USER: hi, \"\"you\"\"\nAGENT: yo\""), std::string::npos);
  EXPECT_EQ(a.find("prompted"), std::string::npos);
  EXPECT_EQ(a.find("base"), std::string::npos);
}
