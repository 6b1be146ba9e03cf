#include "dpf/core/serialize.hpp"

#include "dpf/error.hpp"

namespace dpf::core {
namespace {

template <class T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad field '") + key + "': " + e.what());
  }
}

std::string str(const json& j, const char* key) { return field<std::string>(j, key); }

}  // namespace

void check_version(const json& j) {
  if (!j.is_object()) throw SchemaError("record is not a JSON object");
  auto it = j.find("v");
  if (it == j.end()) throw SchemaError("missing schema version 'v'");
  if (!it->is_number_integer() || it->get<int>() != kSchemaVersion) {
    throw SchemaError("unsupported schema version " + it->dump());
  }
}

void to_json(json& j, const Topic& v) {
  j = json{{"v", kSchemaVersion},
           {"id", v.id},
           {"text", v.text},
           {"status", to_string(v.status)},
           {"source", to_string(v.source)}};
}

void from_json(const json& j, Topic& v) {
  check_version(j);
  v.id = str(j, "id");
  v.text = str(j, "text");
  v.status = parse_review_status(str(j, "status"));
  v.source = parse_topic_source(str(j, "source"));
}

void to_json(json& j, const PinkElephantPair& v) {
  j = json{{"v", kSchemaVersion}, {"id", v.id},     {"topic_id", v.topic_id},
           {"pink", v.pink},      {"grey", v.grey}, {"status", to_string(v.status)}};
}

void from_json(const json& j, PinkElephantPair& v) {
  check_version(j);
  v.id = str(j, "id");
  v.topic_id = str(j, "topic_id");
  v.pink = str(j, "pink");
  v.grey = str(j, "grey");
  v.status = parse_review_status(str(j, "status"));
}

void to_json(json& j, const Attribute& v) {
  j = json{{"v", kSchemaVersion}, {"id", v.id}, {"text", v.text}};
}

void from_json(const json& j, Attribute& v) {
  check_version(j);
  v.id = str(j, "id");
  v.text = str(j, "text");
}

void to_json(json& j, const Turn& v) {
  j = json{{"role", to_string(v.role)}, {"text", v.text}};
}

void from_json(const json& j, Turn& v) {
  v.role = parse_role(str(j, "role"));
  v.text = str(j, "text");
}

void to_json(json& j, const GenerationMeta& v) {
  j = json{{"model", v.model},
           {"temperature", v.temperature},
           {"max_tokens", v.max_tokens},
           {"perplexity", v.perplexity ? json(*v.perplexity) : json(nullptr)},
           {"candidate_count", v.candidate_count},
           {"selected_index", v.selected_index},
           {"logprobs_fallback", v.logprobs_fallback}};
}

void from_json(const json& j, GenerationMeta& v) {
  v.model = str(j, "model");
  v.temperature = field<double>(j, "temperature");
  v.max_tokens = field<std::size_t>(j, "max_tokens");
  const auto& p = j.at("perplexity");
  v.perplexity = p.is_null() ? std::nullopt : std::optional<double>(p.get<double>());
  v.candidate_count = field<std::size_t>(j, "candidate_count");
  v.selected_index = field<std::size_t>(j, "selected_index");
  v.logprobs_fallback = field<bool>(j, "logprobs_fallback");
}

void to_json(json& j, const Dialogue& v) {
  j = json{{"v", kSchemaVersion}, {"id", v.id},       {"pep_id", v.pep_id},
           {"attribute_id", v.attribute_id},          {"plan", v.plan},
           {"turns", v.turns},    {"gen_meta", v.gen_meta}};
}

void from_json(const json& j, Dialogue& v) {
  check_version(j);
  v.id = str(j, "id");
  v.pep_id = str(j, "pep_id");
  v.attribute_id = str(j, "attribute_id");
  v.plan = field<std::vector<std::string>>(j, "plan");
  v.turns = field<std::vector<Turn>>(j, "turns");
  v.gen_meta = field<GenerationMeta>(j, "gen_meta");
}

void to_json(json& j, const RevisionRecord& v) {
  j = json{{"v", kSchemaVersion},
           {"dialogue_id", v.dialogue_id},
           {"critique", v.critique},
           {"original_final", v.original_final},
           {"revised_final", v.revised_final}};
}

void from_json(const json& j, RevisionRecord& v) {
  check_version(j);
  v.dialogue_id = str(j, "dialogue_id");
  v.critique = str(j, "critique");
  v.original_final = str(j, "original_final");
  v.revised_final = str(j, "revised_final");
}

void to_json(json& j, const PreferencePair& v) {
  j = json{{"v", kSchemaVersion},     {"id", v.id},
           {"pep_id", v.pep_id},      {"system_prompt", v.system_prompt},
           {"context", v.context},    {"rejected", v.rejected},
           {"chosen", v.chosen},      {"split", to_string(v.split)}};
}

void from_json(const json& j, PreferencePair& v) {
  check_version(j);
  v.id = str(j, "id");
  v.pep_id = str(j, "pep_id");
  v.system_prompt = str(j, "system_prompt");
  v.context = field<std::vector<Turn>>(j, "context");
  v.rejected = str(j, "rejected");
  v.chosen = str(j, "chosen");
  v.split = parse_split(str(j, "split"));
}

void to_json(json& j, const Span& v) { j = json::array({v.start, v.end}); }

void from_json(const json& j, Span& v) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("span must be [start, end]");
  v.start = j[0].get<std::size_t>();
  v.end = j[1].get<std::size_t>();
}

void to_json(json& j, const MentionVerdict& v) {
  j = json{{"v", kSchemaVersion},
           {"matched", v.matched},
           {"method", to_string(v.method)},
           {"score", v.score},
           {"span", v.span ? json(*v.span) : json(nullptr)}};
}

void from_json(const json& j, MentionVerdict& v) {
  check_version(j);
  v.matched = field<bool>(j, "matched");
  v.method = parse_mention_method(str(j, "method"));
  v.score = field<double>(j, "score");
  const auto& s = j.at("span");
  v.span = s.is_null() ? std::nullopt : std::optional<Span>(s.get<Span>());
}

void to_json(json& j, const EvalRecord& v) {
  j = json{{"v", kSchemaVersion},
           {"dialogue_id", v.dialogue_id},
           {"condition", to_string(v.condition)},
           {"generated_final", v.generated_final},
           {"judge_label", v.judge_label},
           {"judge_raw", v.judge_raw}};
}

void from_json(const json& j, EvalRecord& v) {
  check_version(j);
  v.dialogue_id = str(j, "dialogue_id");
  v.condition = parse_condition(str(j, "condition"));
  v.generated_final = str(j, "generated_final");
  v.judge_label = field<bool>(j, "judge_label");
  v.judge_raw = str(j, "judge_raw");
}

void to_json(json& j, const MetricsReport& v) {
  j = json{{"v", kSchemaVersion},          {"n", v.n},
           {"base_rate", v.base_rate},     {"base_rate_se", v.base_rate_se},
           {"with_prompt", v.with_prompt}, {"with_prompt_se", v.with_prompt_se},
           {"delta", v.delta},             {"delta_se", v.delta_se}};
}

void from_json(const json& j, MetricsReport& v) {
  check_version(j);
  v.n = field<std::size_t>(j, "n");
  v.base_rate = field<double>(j, "base_rate");
  v.base_rate_se = field<double>(j, "base_rate_se");
  v.with_prompt = field<double>(j, "with_prompt");
  v.with_prompt_se = field<double>(j, "with_prompt_se");
  v.delta = field<double>(j, "delta");
  v.delta_se = field<double>(j, "delta_se");
}

}  // namespace dpf::core
