#include "dpf/core/types.hpp"

#include <array>
#include <utility>

#include "dpf/core/hash.hpp"
#include "dpf/core/text.hpp"
#include "dpf/error.hpp"

namespace dpf::core {
namespace {

template <class E, std::size_t N>
std::string_view name_of(E value, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "?";
}

template <class E, std::size_t N>
E parse_name(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view what) {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  throw SchemaError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<ReviewStatus, std::string_view>, 3> kStatus{{
    {ReviewStatus::candidate, "candidate"},
    {ReviewStatus::approved, "approved"},
    {ReviewStatus::rejected, "rejected"},
}};
constexpr std::array<std::pair<TopicSource, std::string_view>, 2> kSource{{
    {TopicSource::generated, "generated"},
    {TopicSource::manual, "manual"},
}};
constexpr std::array<std::pair<Role, std::string_view>, 2> kRole{{
    {Role::user, "user"},
    {Role::agent, "agent"},
}};
constexpr std::array<std::pair<MentionMethod, std::string_view>, 4> kMethod{{
    {MentionMethod::exact_substring, "exact_substring"},
    {MentionMethod::levenshtein_window, "levenshtein_window"},
    {MentionMethod::hamming_window, "hamming_window"},
    {MentionMethod::embedding_cosine, "embedding_cosine"},
}};
constexpr std::array<std::pair<Condition, std::string_view>, 2> kCondition{{
    {Condition::base, "base"},
    {Condition::prompted, "prompted"},
}};
constexpr std::array<std::pair<Split, std::string_view>, 3> kSplit{{
    {Split::train, "train"},
    {Split::val, "val"},
    {Split::test, "test"},
}};

}  // namespace

std::string_view to_string(ReviewStatus v) { return name_of(v, kStatus); }
std::string_view to_string(TopicSource v) { return name_of(v, kSource); }
std::string_view to_string(Role v) { return name_of(v, kRole); }
std::string_view to_string(MentionMethod v) { return name_of(v, kMethod); }
std::string_view to_string(Condition v) { return name_of(v, kCondition); }
std::string_view to_string(Split v) { return name_of(v, kSplit); }

ReviewStatus parse_review_status(std::string_view s) { return parse_name(s, kStatus, "status"); }
TopicSource parse_topic_source(std::string_view s) { return parse_name(s, kSource, "source"); }
Role parse_role(std::string_view s) { return parse_name(s, kRole, "role"); }
MentionMethod parse_mention_method(std::string_view s) { return parse_name(s, kMethod, "method"); }
Condition parse_condition(std::string_view s) { return parse_name(s, kCondition, "condition"); }
Split parse_split(std::string_view s) { return parse_name(s, kSplit, "split"); }

Topic make_topic(std::string_view text, TopicSource source) {
  Topic t;
  t.text = text::collapse_whitespace(text);
  t.id = content_id("topic", {text::normalize(text)});
  t.source = source;
  return t;
}

PinkElephantPair make_pep(const Id& topic_id, std::string_view pink, std::string_view grey) {
  PinkElephantPair p;
  p.topic_id = topic_id;
  p.pink = text::collapse_whitespace(pink);
  p.grey = text::collapse_whitespace(grey);
  p.id = content_id("pep", {topic_id, text::normalize(pink), text::normalize(grey)});
  return p;
}

Attribute make_attribute(std::string_view text) {
  Attribute a;
  a.text = text::collapse_whitespace(text);
  a.id = content_id("attr", {text::normalize(text)});
  return a;
}

std::string unordered_pair_key(std::string_view a, std::string_view b) {
  auto na = text::normalize(a);
  auto nb = text::normalize(b);
  if (nb < na) std::swap(na, nb);
  return na + '\x1f' + nb;
}

}  // namespace dpf::core
