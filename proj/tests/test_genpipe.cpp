#include <atomic>
#include <set>

#include <gtest/gtest.h>

#include "dpf/core/text.hpp"
#include "dpf/genpipe/parse.hpp"
#include "dpf/genpipe/prompts.hpp"
#include "dpf/genpipe/stages.hpp"
#include "dpf/llmio/mock_backend.hpp"
#include "dpf/llmio/tags.hpp"
#include "dpf/util/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dpf;
using namespace dpf::genpipe;
using core::Role;
using testkit::random_plan_dialogue;

namespace {

core::Topic approved_topic(const std::string& text) {
  auto t = core::make_topic(text);
  t.status = core::ReviewStatus::approved;
  return t;
}

}  // namespace

TEST(Parser, ParsesPlanThenTranscript) {
  auto pd = parse_plan_dialogue(
      "Plan:\n1. Talk about running\n2. Recommend Nike\n---\nUSER: Any tips for shoes?\n"
      "AGENT: Depends on your gait.\nUSER: I overpronate.\nAGENT: Try Nike,\nthey fit wide feet.\n");
  ASSERT_EQ(pd.plan.size(), 2u);
  EXPECT_EQ(pd.plan[1], "Recommend Nike");
  ASSERT_EQ(pd.turns.size(), 4u);
  EXPECT_EQ(pd.turns[3].text, "Try Nike, they fit wide feet.");
}

TEST(Parser, RoundTripsRandomWellFormedTranscripts) {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    auto pd = random_plan_dialogue(rng);
    ASSERT_EQ(parse_plan_dialogue(format_plan_dialogue(pd)), pd);
  }
}

TEST(Parser, RejectsMalformedMutations) {
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    auto m = testkit::mutate(random_plan_dialogue(rng), rng);
    EXPECT_THROW(parse_plan_dialogue(m.no_separator), ParseError);
    EXPECT_THROW(parse_plan_dialogue(m.duplicated_role), RoleOrderError);
    EXPECT_THROW(parse_plan_dialogue(m.unnumbered_step), ParseError);
  }
}

TEST(Parser, OtherFailures) {
  EXPECT_THROW(parse_plan_dialogue("1. a\n---\nUSER: hi\nAGENT: yo\n"), ParseError);  // one step
  EXPECT_THROW(parse_plan_dialogue("1. a\n3. b\n---\nUSER: hi\nAGENT: yo\n"), ParseError);
  EXPECT_THROW(parse_plan_dialogue("1. a\n2. b\n---\nAGENT: hi\nUSER: yo\n"), RoleOrderError);
  EXPECT_THROW(parse_plan_dialogue("1. a\n2. b\n---\nUSER: hi\n"), RoleOrderError);
  EXPECT_THROW(parse_plan_dialogue("1. a\n2. b\n---\n"), ParseError);
  EXPECT_NO_THROW(parse_plan_dialogue("1. a\n2. b\n---\nuser: hi\nAgent : yo\n"));
}

TEST(ListParsing, NumberedBulletedAndPlain) {
  EXPECT_EQ(parse_list("Here are topics:\n1. Sports\n2) **Travel**\n- Food\n"),
            (std::vector<std::string>{"Sports", "Travel", "Food"}));
  EXPECT_EQ(parse_list("Sports\n\nTravel\n"), (std::vector<std::string>{"Sports", "Travel"}));
  auto pairs = parse_pairs("Pairs:\n1. (Nike, Adidas)\n2. (Coca-Cola, Pepsi)\nnote, ignore\n");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[1], (std::pair<std::string, std::string>{"Coca-Cola", "Pepsi"}));
  EXPECT_EQ(parse_pairs("Nike, Adidas\n").size(), 1u);
}

TEST(Prompts, DefaultsAreCompleteAndRender) {
  auto ps = PromptSet::defaults();
  EXPECT_NO_THROW(ps.check_all());
  EXPECT_EQ(render("x {topic} y", {{"topic", "Sports"}}), "x Sports y");
  EXPECT_THROW(render("{topic}", {}), TemplateError);
  StagePrompt bad{PromptStage::peps, "no placeholder here"};
  EXPECT_THROW(check(bad), TemplateError);
  auto other = ps;
  other.critique.text += " ";
  EXPECT_NE(other.hash(), ps.hash());
}

TEST(Stages, TopicsAreDedupedAndBounded) {
  llmio::Client client(testkit::mock_config(1));
  GenOptions opts;
  auto topics = gen_topics(20, client, opts);
  EXPECT_EQ(topics.size(), 20u);  // the mock repeats one item; dedup drops it
  std::set<std::string> ids;
  for (const auto& t : topics) EXPECT_TRUE(ids.insert(t.id).second);
  EXPECT_EQ(topics, gen_topics(20, client, opts));
}

TEST(Stages, UnparseableListRaises) {
  auto backend = std::make_shared<llmio::MockBackend>(testkit::mock_config(1));
  backend->set_responder([](const llmio::ChatRequest&, std::size_t) {
    llmio::ChatResponse r;
    r.text = "Sorry, I can't help with that.";
    return std::optional(r);
  });
  llmio::Client client(testkit::mock_config(1), backend);
  EXPECT_THROW(gen_topics(10, client, {}), UnparseableList);
}

TEST(Stages, PepsNeedApprovedTopicAndDropDuplicates) {
  llmio::Client client(testkit::mock_config(1));
  GenOptions opts;
  EXPECT_THROW(gen_peps(core::make_topic("Sports"), client, opts), std::invalid_argument);
  auto peps = gen_peps(approved_topic("Sports"), client, opts);
  ASSERT_FALSE(peps.empty());
  std::set<std::string> keys;
  for (const auto& p : peps) {
    EXPECT_NE(text::normalize(p.pink), text::normalize(p.grey));
    EXPECT_TRUE(keys.insert(core::unordered_pair_key(p.pink, p.grey)).second);
  }
  opts.emit_swapped = true;
  auto both = gen_peps(approved_topic("Sports"), client, opts);
  ASSERT_EQ(both.size(), 2 * peps.size());
  EXPECT_EQ(both[1].pink, both[0].grey);
}

TEST(Stages, DialogueIsDeterministicAndKeepsGenerationMeta) {
  llmio::Client client(testkit::mock_config(2));
  GenOptions opts;
  auto topic = approved_topic("Sports");
  auto pep = core::make_pep(topic.id, "Nike", "Adidas");
  auto attr = core::make_attribute("price sensitivity");
  std::optional<core::Dialogue> d;
  std::size_t ordinal = 0;
  for (; ordinal < 20 && !d; ++ordinal) {
    try {
      d = gen_dialogue(pep, attr, topic, client, opts, ordinal);
    } catch (const GenError&) {
    }
  }
  ASSERT_TRUE(d);
  EXPECT_EQ(*d, gen_dialogue(pep, attr, topic, client, opts, ordinal - 1));
  EXPECT_EQ(d->gen_meta.candidate_count, 2u);
  EXPECT_TRUE(d->gen_meta.perplexity);
  EXPECT_GE(d->plan.size(), 2u);
  EXPECT_EQ(d->turns.back().role, Role::agent);
}

TEST(Stages, DialogueWithAFailedCandidateIsNotKept) {
  auto backend = std::make_shared<llmio::MockBackend>(testkit::mock_config(2));
  backend->set_fault([](const llmio::ChatRequest& req, std::size_t) {
    if (*req.sampling.seed % 2) throw llmio::AuthError("candidate refused");
  });
  llmio::Client client(testkit::mock_config(2), backend);
  auto topic = approved_topic("Sports");
  auto pep = core::make_pep(topic.id, "Nike", "Adidas");
  // candidates use seed and seed + 1, so exactly one of them fails
  EXPECT_THROW(gen_dialogue(pep, core::make_attribute("price"), topic, client, {}, 0), IncompleteSelection);
}

TEST(Stages, CritiqueAndRevisionNeverSeeThePlan) {
  GenOptions opts;
  auto pep = core::make_pep("topic_x", "Nike", "Adidas");
  core::Dialogue d;
  d.id = "dialogue_1";
  d.pep_id = pep.id;
  d.plan = {"SECRET-PLAN-STEP one", "SECRET-PLAN-STEP two"};
  d.turns = {{Role::user, "Shoes?"}, {Role::agent, "Nike, obviously."}};
  auto c = critique_request(d, pep, opts);
  auto r = revision_request(d, pep, "it names Nike", opts);
  for (const auto* req : {&c, &r}) {
    auto text = llmio::MockBackend::prompt_text(*req);
    EXPECT_EQ(text.find("SECRET-PLAN-STEP"), std::string::npos);
    EXPECT_NE(text.find("Nike, obviously."), std::string::npos);
  }
}

TEST(Stages, EmptyCritiqueRetriedOnceThenFails) {
  auto backend = std::make_shared<llmio::MockBackend>(testkit::mock_config(1));
  std::atomic<int> calls{0};
  backend->set_responder([&](const llmio::ChatRequest&, std::size_t) {
    ++calls;
    llmio::ChatResponse r;
    r.text = "   ";
    return std::optional(r);
  });
  llmio::Client client(testkit::mock_config(1), backend);
  auto pep = core::make_pep("topic_x", "Nike", "Adidas");
  core::Dialogue d;
  d.id = "dialogue_1";
  d.turns = {{Role::user, "Shoes?"}, {Role::agent, "Nike."}};
  EXPECT_THROW(critique(d, pep, client, {}), EmptyCompletion);
  EXPECT_EQ(calls.load(), 2);
}

TEST(Stages, RevisionStripsLabelsAndQuotes) {
  auto backend = std::make_shared<llmio::MockBackend>(testkit::mock_config(1));
  backend->set_responder([&](const llmio::ChatRequest&, std::size_t) {
    llmio::ChatResponse r;
    r.text = "AGENT: \"Adidas has great options.\"";
    return std::optional(r);
  });
  llmio::Client client(testkit::mock_config(1), backend);
  auto pep = core::make_pep("topic_x", "Nike", "Adidas");
  core::Dialogue d;
  d.id = "dialogue_1";
  d.turns = {{Role::user, "Shoes?"}, {Role::agent, "Nike  is best."}};
  auto rev = revise(d, pep, "mentions Nike", client, {});
  EXPECT_EQ(rev.revised_final, "Adidas has great options.");
  EXPECT_EQ(rev.original_final, "Nike  is best.");
  EXPECT_EQ(rev.dialogue_id, d.id);
}
