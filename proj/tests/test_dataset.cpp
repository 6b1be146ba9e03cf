#include <cstdlib>
#include <set>

#include <gtest/gtest.h>

#include "dpf/core/hash.hpp"
#include "dpf/core/validate.hpp"
#include "dpf/dataset/export.hpp"
#include "dpf/dataset/pairs.hpp"
#include "dpf/dataset/split.hpp"
#include "support.hpp"

using namespace dpf;
using namespace dpf::dataset;
using core::Role;
using core::Split;

namespace {

std::vector<core::Id> pep_ids(std::size_t n) {
  std::vector<core::Id> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("pep_" + std::to_string(100000 + i));
  return ids;
}

std::map<Split, std::size_t> sizes(const std::map<core::Id, Split>& m) {
  std::map<Split, std::size_t> out{{Split::train, 0}, {Split::val, 0}, {Split::test, 0}};
  for (const auto& [id, s] : m) ++out[s];
  return out;
}

struct Fixture {
  core::PinkElephantPair pep;
  core::Dialogue dialogue;
  core::RevisionRecord revision;
};

Fixture fixture(const std::string& pink, const std::string& grey, const std::string& question) {
  auto topic = core::make_topic("Brands");
  Fixture f;
  f.pep = core::make_pep(topic.id, pink, grey);
  f.dialogue.id = content_id("dialogue", {f.pep.id, "a", "0"});
  f.dialogue.pep_id = f.pep.id;
  f.dialogue.attribute_id = "attr_x";
  f.dialogue.turns = {{Role::user, "Hi there."},
                      {Role::agent, "Hello! How can I help?"},
                      {Role::user, question},
                      {Role::agent, "I would pick " + pink + ", no question."}};
  f.revision = {f.dialogue.id, "The reply names " + pink + ".", f.dialogue.turns.back().text,
                "Have a look at " + grey + "; it suits you well."};
  return f;
}

std::vector<core::PreferencePair> three_pairs() {
  std::vector<core::PreferencePair> out;
  auto a = fixture("Nike", "Adidas", "Which running shoe should I buy?");
  auto b = fixture("Coca-Cola", "Pepsi", "What soda goes with \"pizza\"?");
  auto c = fixture("Zürich", "Geneva", "Where should I go\nfor a weekend?");
  out.push_back(build_preference_pair(a.dialogue, a.revision, a.pep, Split::train));
  out.push_back(build_preference_pair(b.dialogue, b.revision, b.pep, Split::val));
  out.push_back(build_preference_pair(c.dialogue, c.revision, c.pep, Split::test));
  return out;
}

}  // namespace

TEST(Split, HundredPepsGiveNinetySixTwoTwo) {
  auto m = split_by_pep(pep_ids(100), {.seed = 1});
  auto s = sizes(m);
  EXPECT_EQ(s[Split::train], 96u);
  EXPECT_EQ(s[Split::val], 2u);
  EXPECT_EQ(s[Split::test], 2u);
}

TEST(Split, LargeSplitIsExactDisjointAndDeterministic) {
  auto ids = pep_ids(2500);
  auto a = split_by_pep(ids, {.seed = 9});
  auto b = split_by_pep(ids, {.seed = 9});
  EXPECT_EQ(a, b);
  auto s = sizes(a);
  EXPECT_EQ(s[Split::train], 2400u);
  EXPECT_EQ(s[Split::val], 50u);
  EXPECT_EQ(s[Split::test], 50u);
  EXPECT_EQ(a.size(), ids.size());  // a map: each id lands in exactly one split
  EXPECT_NE(a, split_by_pep(ids, {.seed = 10}));
}

TEST(Split, InputOrderDoesNotMatter) {
  auto ids = pep_ids(300);
  auto rev = ids;
  std::reverse(rev.begin(), rev.end());
  EXPECT_EQ(split_by_pep(ids, {.seed = 4}), split_by_pep(rev, {.seed = 4}));
}

TEST(Split, TinyAndInvalidInputs) {
  auto m = split_by_pep(pep_ids(2), {});
  EXPECT_EQ(sizes(m)[Split::train], 2u);
  EXPECT_TRUE(split_by_pep({}, {}).empty());
  EXPECT_THROW(split_by_pep({"pep_a", "pep_a", "pep_b"}, {}), std::invalid_argument);
  EXPECT_THROW(check(SplitConfig{.train = 0.9, .val = 0.2, .test = 0.0}), std::invalid_argument);
  EXPECT_THROW(check(SplitConfig{.train = 1.1, .val = -0.1, .test = 0.0}), std::invalid_argument);
}

TEST(Pairs, BuildsContextAndPrompt) {
  auto f = fixture("Nike", "Adidas", "Shoes?");
  auto p = build_preference_pair(f.dialogue, f.revision, f.pep, Split::val);
  EXPECT_EQ(p.system_prompt, "You must not mention or discuss Nike. If it comes up, steer the conversation to Adidas.");
  ASSERT_EQ(p.context.size(), 3u);
  EXPECT_EQ(p.context.back().role, Role::user);
  EXPECT_EQ(p.rejected, f.dialogue.turns.back().text);
  EXPECT_EQ(p.chosen, f.revision.revised_final);
  EXPECT_TRUE(core::validate(p).empty());
  EXPECT_EQ(render_avoidance_prompt("{pink}/{grey}/{other}", f.pep), "Nike/Adidas/{other}");
}

TEST(Pairs, DegenerateAndMismatchedInputs) {
  auto f = fixture("Nike", "Adidas", "Shoes?");
  auto same = f.revision;
  same.revised_final = f.revision.original_final + "  ";
  EXPECT_THROW(build_preference_pair(f.dialogue, same, f.pep, Split::train), DegeneratePair);
  auto other = f.pep;
  other.id = "pep_other";
  EXPECT_THROW(build_preference_pair(f.dialogue, f.revision, other, Split::train), std::invalid_argument);
  auto d = f.dialogue;
  d.turns.pop_back();
  EXPECT_THROW(build_preference_pair(d, f.revision, f.pep, Split::train), std::invalid_argument);
}

TEST(Export, MatchesGoldenFile) {
  auto golden = fs::path(DPF_TEST_DATA_DIR) / "golden" / "three_pairs.dpo.jsonl";
  auto rendered = render_export(three_pairs(), ExportFormat::dpo_jsonl);
  if (std::getenv("DPF_UPDATE_GOLDEN")) write_file_atomic(golden, rendered);
  EXPECT_EQ(rendered, read_file(golden));
}

TEST(Export, DpoRoundTripAndSchema) {
  testkit::TempDir dir;
  auto pairs = three_pairs();
  Provenance prov{{pairs[0].id, {{"topic", "Brands"}}}};
  export_pairs(pairs, dir / "x.dpo.jsonl", ExportFormat::dpo_jsonl, prov);
  EXPECT_EQ(import_dpo_jsonl(dir / "x.dpo.jsonl"), pairs);
  auto values = read_jsonl_values(dir / "x.dpo.jsonl");
  ASSERT_EQ(values.size(), 3u);
  const auto& r = values[0];
  EXPECT_EQ(r["v"], 1);
  EXPECT_EQ(r["meta"]["topic"], "Brands");
  EXPECT_EQ(r["meta"]["split"], "train");
  EXPECT_EQ(r["messages"].back()["role"], "user");
  EXPECT_EQ(r["messages"][1]["role"], "assistant");
  for (const auto& key : {"v", "id", "system", "messages", "chosen", "rejected", "meta"}) EXPECT_TRUE(r.contains(key));
}

TEST(Export, EmptyExportIsAHeaderOnly) {
  testkit::TempDir dir;
  EXPECT_EQ(render_export({}, ExportFormat::dpo_jsonl), "# dpo_jsonl v1: 0 records\n");
  export_pairs({}, dir / "e.dpo.jsonl", ExportFormat::dpo_jsonl);
  EXPECT_TRUE(import_dpo_jsonl(dir / "e.dpo.jsonl").empty());
}

TEST(Export, TranscriptFormat) {
  auto out = render_export(three_pairs(), ExportFormat::chat_transcript);
  EXPECT_TRUE(out.starts_with("# chat_transcript v1: 3 records\n"));
  EXPECT_NE(out.find("CHOSEN: Have a look at Adidas"), std::string::npos);
  EXPECT_NE(out.find("REJECTED: I would pick Nike"), std::string::npos);
  EXPECT_EQ(out, render_export(three_pairs(), ExportFormat::chat_transcript));
  EXPECT_EQ(parse_export_format("chat_transcript"), ExportFormat::chat_transcript);
  EXPECT_THROW(parse_export_format("csv"), std::exception);
}

TEST(Export, ImportRejectsBadRecords) {
  testkit::TempDir dir;
  write_file_atomic(dir / "bad.jsonl", "{\"v\": 2, \"id\": \"x\"}\n");
  EXPECT_THROW(import_dpo_jsonl(dir / "bad.jsonl"), SchemaError);
  write_file_atomic(dir / "bad2.jsonl", "{\"v\": 1, \"id\": \"x\"}\n");
  EXPECT_THROW(import_dpo_jsonl(dir / "bad2.jsonl"), SchemaError);
}

TEST(Training, DefaultHyperparameters) {
  auto j = to_json(TrainingConfig{});
  EXPECT_EQ(j["beta"], 0.5);
  EXPECT_EQ(j["epochs"], 1);
  EXPECT_EQ(j["global_batch_size"], 64);
  EXPECT_EQ(j["optimizer"], "rmsprop");
  EXPECT_EQ(j["precision"], "bfloat16");
}
