#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpf::core {

using Id = std::string;

// Schema version stamped into every serialized record as "v".
inline constexpr int kSchemaVersion = 1;

enum class ReviewStatus { candidate, approved, rejected };
enum class TopicSource { generated, manual };
enum class Role { user, agent };
enum class MentionMethod { exact_substring, levenshtein_window, hamming_window, embedding_cosine };
enum class Condition { base, prompted };
enum class Split { train, val, test };

std::string_view to_string(ReviewStatus);
std::string_view to_string(TopicSource);
std::string_view to_string(Role);
std::string_view to_string(MentionMethod);
std::string_view to_string(Condition);
std::string_view to_string(Split);

// Parsers throw SchemaError on unknown names.
ReviewStatus parse_review_status(std::string_view);
TopicSource parse_topic_source(std::string_view);
Role parse_role(std::string_view);
MentionMethod parse_mention_method(std::string_view);
Condition parse_condition(std::string_view);
Split parse_split(std::string_view);

struct Topic {
  Id id;
  std::string text;
  ReviewStatus status = ReviewStatus::candidate;
  TopicSource source = TopicSource::generated;

  bool operator==(const Topic&) const = default;
};

struct PinkElephantPair {
  Id id;
  Id topic_id;
  std::string pink;  // the entity to avoid
  std::string grey;  // the entity to steer toward
  ReviewStatus status = ReviewStatus::candidate;

  bool operator==(const PinkElephantPair&) const = default;
};

struct Attribute {
  Id id;
  std::string text;

  bool operator==(const Attribute&) const = default;
};

struct Turn {
  Role role = Role::user;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct GenerationMeta {
  std::string model;
  double temperature = 1.0;
  std::size_t max_tokens = 0;
  std::optional<double> perplexity;
  std::size_t candidate_count = 1;
  std::size_t selected_index = 0;
  bool logprobs_fallback = false;

  bool operator==(const GenerationMeta&) const = default;
};

struct Dialogue {
  Id id;
  Id pep_id;
  Id attribute_id;
  // Kept for provenance only; never rendered into critique or revision prompts.
  std::vector<std::string> plan;
  std::vector<Turn> turns;
  GenerationMeta gen_meta;

  const Turn& final_turn() const { return turns.back(); }

  bool operator==(const Dialogue&) const = default;
};

struct RevisionRecord {
  Id dialogue_id;
  std::string critique;
  std::string original_final;
  std::string revised_final;

  bool operator==(const RevisionRecord&) const = default;
};

struct PreferencePair {
  Id id;
  Id pep_id;
  std::string system_prompt;
  std::vector<Turn> context;  // ends with a user turn
  std::string rejected;       // original final agent turn
  std::string chosen;         // revised final agent turn
  Split split = Split::train;

  bool operator==(const PreferencePair&) const = default;
};

// Character offsets, in Unicode scalar values of the normalized text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct MentionVerdict {
  bool matched = false;
  MentionMethod method = MentionMethod::exact_substring;
  double score = 0.0;
  std::optional<Span> span;

  bool operator==(const MentionVerdict&) const = default;
};

struct EvalRecord {
  Id dialogue_id;
  Condition condition = Condition::base;
  std::string generated_final;
  bool judge_label = false;
  std::string judge_raw;

  bool operator==(const EvalRecord&) const = default;
};

struct MetricsReport {
  std::size_t n = 0;
  double base_rate = 0.0;
  double base_rate_se = 0.0;
  double with_prompt = 0.0;
  double with_prompt_se = 0.0;
  double delta = 0.0;
  double delta_se = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

// Constructors that derive content ids from the defining fields.
Topic make_topic(std::string_view text, TopicSource source = TopicSource::generated);
PinkElephantPair make_pep(const Id& topic_id, std::string_view pink, std::string_view grey);
Attribute make_attribute(std::string_view text);

// Order-insensitive key for a pair: {pink, grey} and {grey, pink} collide.
std::string unordered_pair_key(std::string_view a, std::string_view b);

}  // namespace dpf::core
