#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpf/cleanse/mention.hpp"
#include "dpf/core/hash.hpp"
#include "dpf/core/text.hpp"
#include "dpf/core/types.hpp"

namespace dpf::cleanse {

enum class TruncationFlag { truncated, unchanged_terminal, no_agent_mention };
std::string_view to_string(TruncationFlag);

struct Truncation {
  core::Dialogue dialogue;
  TruncationFlag flag = TruncationFlag::no_agent_mention;
  std::size_t original_turns = 0;
};

// Cuts the dialogue so the first agent turn mentioning pink becomes the last
// turn. User mentions never trigger a cut. Agent turns are checked per
// sentence.
Truncation truncate_at_first_agent_mention(const core::Dialogue& d, std::string_view pink,
                                           const MentionDetector& detector);

enum class FilterReason { ok, pink_before_final, pink_absent_prefinal, pink_in_revision, malformed };
std::string_view to_string(FilterReason);
FilterReason parse_filter_reason(std::string_view);

struct FilterOutcome {
  core::Id dialogue_id;
  bool kept = false;
  FilterReason reason = FilterReason::malformed;
  std::vector<core::MentionVerdict> evidence;
  std::vector<std::string> problems;  // only for malformed
};

void to_json(nlohmann::json& j, const FilterOutcome& v);
void from_json(const nlohmann::json& j, FilterOutcome& v);

// Rule order: earlier agent turns (per sentence), then the original final
// turn, then the revision (both as whole utterances). Every verdict computed
// is kept as evidence, in that order. DetectionUnavailable propagates.
FilterOutcome filter_pair(const core::Dialogue& d, const core::RevisionRecord& revision, std::string_view pink,
                          const MentionDetector& detector);

// Stable dedup: first occurrence wins. `key` maps a record to the text that
// defines its identity; it is normalized before hashing.
template <class T, class KeyFn>
std::vector<T> dedup(const std::vector<T>& records, KeyFn key) {
  std::vector<T> out;
  std::unordered_set<std::string> seen;
  seen.reserve(records.size());
  for (const auto& r : records) {
    if (seen.insert(content_id("dedup", {text::normalize(key(r))})).second) out.push_back(r);
  }
  return out;
}

}  // namespace dpf::cleanse
