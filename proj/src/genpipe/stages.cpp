#include "dpf/genpipe/stages.hpp"

#include <set>
#include <stdexcept>

#include "dpf/core/hash.hpp"
#include "dpf/core/text.hpp"
#include "dpf/llmio/tags.hpp"

namespace dpf::genpipe {
namespace {

using llmio::ChatRequest;
using llmio::Message;
using llmio::MessageRole;

std::uint64_t request_seed(const GenOptions& opts, std::string_view tag, std::string_view key) {
  return hash64(std::to_string(opts.seed) + '\x1f' + std::string(tag) + '\x1f' + std::string(key));
}

ChatRequest single_turn(std::string prompt, const char* tag, double temperature, const GenOptions& opts,
                        std::string_view key) {
  ChatRequest req;
  req.messages.push_back({MessageRole::user, std::move(prompt)});
  req.sampling.temperature = temperature;
  req.sampling.max_tokens = opts.max_tokens;
  req.sampling.seed = request_seed(opts, tag, key);
  req.tag = tag;
  return req;
}

// Strips a leading "AGENT:" label and wrapping quotes from a rewritten turn.
std::string clean_turn(std::string s) {
  s = text::trim(s);
  for (std::string_view label : {"AGENT:", "Agent:", "agent:"}) {
    if (s.starts_with(label)) s = text::trim(std::string_view(s).substr(label.size()));
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = text::trim(std::string_view(s).substr(1, s.size() - 2));
  return text::collapse_whitespace(s);
}

std::string chat_nonempty(ChatRequest req, const llmio::Client& client, const char* what) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto resp = client.chat(req);
    auto out = text::trim(resp.text);
    if (!out.empty()) return out;
    req.sampling.seed = req.sampling.seed.value_or(0) + 1;
  }
  throw EmptyCompletion(std::string(what) + ": empty completion after one retry");
}

}  // namespace

std::vector<core::Topic> gen_topics(std::size_t n, const llmio::Client& client, const GenOptions& opts) {
  if (n == 0) throw std::invalid_argument("gen_topics: n must be >= 1");
  auto prompt = render(opts.prompts.topics.text, {{"count", std::to_string(n)}});
  auto req = single_turn(std::move(prompt), llmio::tags::kTopics, opts.list_temperature, opts, "topics");
  req.hints["count"] = std::to_string(n);
  auto items = parse_list(client.chat(req).text);
  if (items.size() < 3) throw UnparseableList("topics: only " + std::to_string(items.size()) + " items found");

  std::vector<core::Topic> out;
  std::set<core::Id> seen;
  for (const auto& item : items) {
    if (out.size() == n) break;
    if (text::normalize(item).empty()) continue;
    auto t = core::make_topic(item);
    if (seen.insert(t.id).second) out.push_back(std::move(t));
  }
  return out;
}

std::vector<core::PinkElephantPair> gen_peps(const core::Topic& topic, const llmio::Client& client,
                                             const GenOptions& opts) {
  if (topic.status != core::ReviewStatus::approved) {
    throw std::invalid_argument("gen_peps: topic '" + topic.text + "' is not approved");
  }
  auto prompt = render(opts.prompts.peps.text, {{"topic", topic.text}});
  auto req = single_turn(std::move(prompt), llmio::tags::kPeps, opts.list_temperature, opts, topic.id);
  req.hints["topic"] = topic.text;
  auto pairs = parse_pairs(client.chat(req).text);
  if (pairs.empty()) throw UnparseableList("peps: no (x, y) pairs found for topic '" + topic.text + "'");

  std::vector<core::PinkElephantPair> out;
  std::set<std::string> seen;
  for (const auto& [x, y] : pairs) {
    auto nx = text::normalize(x);
    auto ny = text::normalize(y);
    if (nx.empty() || ny.empty() || nx == ny) continue;
    if (!seen.insert(core::unordered_pair_key(x, y)).second) continue;
    out.push_back(core::make_pep(topic.id, x, y));
    if (opts.emit_swapped) out.push_back(core::make_pep(topic.id, y, x));
  }
  return out;
}

std::vector<core::Attribute> gen_attributes(std::size_t n, const llmio::Client& client, const GenOptions& opts) {
  if (n == 0) throw std::invalid_argument("gen_attributes: n must be >= 1");
  auto prompt = render(opts.prompts.attributes.text, {{"count", std::to_string(n)}});
  auto req = single_turn(std::move(prompt), llmio::tags::kAttributes, opts.list_temperature, opts, "attributes");
  req.hints["count"] = std::to_string(n);
  auto items = parse_list(client.chat(req).text);
  if (items.size() < 3) throw UnparseableList("attributes: only " + std::to_string(items.size()) + " items found");

  std::vector<core::Attribute> out;
  std::set<core::Id> seen;
  for (const auto& item : items) {
    if (out.size() == n) break;
    if (text::normalize(item).empty()) continue;
    auto a = core::make_attribute(item);
    if (seen.insert(a.id).second) out.push_back(std::move(a));
  }
  return out;
}

ChatRequest dialogue_request(const core::PinkElephantPair& pep, const core::Attribute& attribute,
                             const core::Topic& topic, const GenOptions& opts, std::size_t ordinal) {
  const std::map<std::string, std::string> vars{{"topic", topic.text},
                                                {"pink_elephant", pep.pink},
                                                {"grey_elephant", pep.grey},
                                                {"attribute", attribute.text}};
  auto prompt = render(opts.prompts.dialogue.text, vars) + render(opts.prompts.dialogue_theme.text, vars);
  auto req = single_turn(std::move(prompt), llmio::tags::kDialogue, opts.dialogue_temperature, opts,
                         pep.id + '\x1f' + attribute.id + '\x1f' + std::to_string(ordinal));
  req.want_logprobs = true;
  req.hints = {{"topic", topic.text}, {"pink", pep.pink}, {"grey", pep.grey}, {"attribute", attribute.text}};
  return req;
}

core::Dialogue gen_dialogue(const core::PinkElephantPair& pep, const core::Attribute& attribute,
                            const core::Topic& topic, const llmio::Client& client, const GenOptions& opts,
                            std::size_t ordinal) {
  auto req = dialogue_request(pep, attribute, topic, opts, ordinal);
  auto resp = client.best_of_n(req, std::max<std::size_t>(opts.best_of_n, 1));
  if (resp.selection && resp.selection->succeeded < resp.selection->requested) {
    throw IncompleteSelection(std::to_string(resp.selection->succeeded) + " of " +
                              std::to_string(resp.selection->requested) + " candidates succeeded");
  }
  auto pd = parse_plan_dialogue(resp.text);
  if (pd.turns.size() < opts.min_turns || pd.turns.size() > opts.max_turns) {
    throw DialogueLengthError("dialogue has " + std::to_string(pd.turns.size()) + " turns, outside [" +
                              std::to_string(opts.min_turns) + ", " + std::to_string(opts.max_turns) + "]");
  }

  core::Dialogue d;
  d.id = content_id("dialogue", {pep.id, attribute.id, std::to_string(ordinal)});
  d.pep_id = pep.id;
  d.attribute_id = attribute.id;
  d.plan = std::move(pd.plan);
  d.turns = std::move(pd.turns);
  d.gen_meta.model = resp.model;
  d.gen_meta.temperature = req.sampling.temperature;
  d.gen_meta.max_tokens = req.sampling.max_tokens;
  if (resp.selection) {
    d.gen_meta.perplexity = resp.selection->perplexity;
    d.gen_meta.candidate_count = resp.selection->requested;
    d.gen_meta.selected_index = resp.selection->selected_index;
    d.gen_meta.logprobs_fallback = resp.selection->logprobs_fallback;
  }
  return d;
}

ChatRequest critique_request(const core::Dialogue& d, const core::PinkElephantPair& pep, const GenOptions& opts) {
  auto prompt = render(opts.prompts.critique.text, {{"dialogue", text::trim(format_transcript(d.turns))},
                                                    {"pink_elephant", pep.pink},
                                                    {"grey_elephant", pep.grey}});
  auto req = single_turn(std::move(prompt), llmio::tags::kCritique, opts.edit_temperature, opts, d.id);
  req.hints = {{"pink", pep.pink}, {"grey", pep.grey}};
  return req;
}

ChatRequest revision_request(const core::Dialogue& d, const core::PinkElephantPair& pep,
                             const std::string& critique_text, const GenOptions& opts) {
  auto prompt = render(opts.prompts.revision.text, {{"dialogue", text::trim(format_transcript(d.turns))},
                                                    {"critique", critique_text},
                                                    {"pink_elephant", pep.pink},
                                                    {"grey_elephant", pep.grey}});
  auto req = single_turn(std::move(prompt), llmio::tags::kRevision, opts.edit_temperature, opts, d.id);
  req.hints = {{"pink", pep.pink}, {"grey", pep.grey}};
  return req;
}

std::string critique(const core::Dialogue& d, const core::PinkElephantPair& pep, const llmio::Client& client,
                     const GenOptions& opts) {
  return chat_nonempty(critique_request(d, pep, opts), client, "critique");
}

core::RevisionRecord revise(const core::Dialogue& d, const core::PinkElephantPair& pep,
                            const std::string& critique_text, const llmio::Client& client, const GenOptions& opts) {
  if (text::trim(critique_text).empty()) throw std::invalid_argument("revise: critique is empty");
  if (d.turns.empty() || d.turns.back().role != core::Role::agent) {
    throw std::invalid_argument("revise: dialogue does not end with an agent turn");
  }
  auto revised = clean_turn(chat_nonempty(revision_request(d, pep, critique_text, opts), client, "revision"));
  if (revised.empty()) throw EmptyCompletion("revision: nothing left after removing labels");
  return core::RevisionRecord{d.id, text::trim(critique_text), d.turns.back().text, revised};
}

}  // namespace dpf::genpipe
