#pragma once

#include <nlohmann/json.hpp>

#include "dpf/core/types.hpp"

// JSON mapping for the core records. Every top-level record carries the
// schema version under "v"; from_json rejects missing or unknown versions.
// Nested values (Turn, Span, GenerationMeta) are unversioned.
namespace dpf::core {

using json = nlohmann::json;

void to_json(json& j, const Topic& v);
void from_json(const json& j, Topic& v);
void to_json(json& j, const PinkElephantPair& v);
void from_json(const json& j, PinkElephantPair& v);
void to_json(json& j, const Attribute& v);
void from_json(const json& j, Attribute& v);
void to_json(json& j, const Turn& v);
void from_json(const json& j, Turn& v);
void to_json(json& j, const GenerationMeta& v);
void from_json(const json& j, GenerationMeta& v);
void to_json(json& j, const Dialogue& v);
void from_json(const json& j, Dialogue& v);
void to_json(json& j, const RevisionRecord& v);
void from_json(const json& j, RevisionRecord& v);
void to_json(json& j, const PreferencePair& v);
void from_json(const json& j, PreferencePair& v);
void to_json(json& j, const Span& v);
void from_json(const json& j, Span& v);
void to_json(json& j, const MentionVerdict& v);
void from_json(const json& j, MentionVerdict& v);
void to_json(json& j, const EvalRecord& v);
void from_json(const json& j, EvalRecord& v);
void to_json(json& j, const MetricsReport& v);
void from_json(const json& j, MetricsReport& v);

// Throws SchemaError unless j["v"] == kSchemaVersion.
void check_version(const json& j);

}  // namespace dpf::core
