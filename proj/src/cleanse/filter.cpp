#include "dpf/cleanse/filter.hpp"

#include <stdexcept>

#include "dpf/core/serialize.hpp"
#include "dpf/core/validate.hpp"

namespace dpf::cleanse {

std::string_view to_string(TruncationFlag f) {
  switch (f) {
    case TruncationFlag::truncated: return "truncated";
    case TruncationFlag::unchanged_terminal: return "unchanged_terminal";
    case TruncationFlag::no_agent_mention: return "no_agent_mention";
  }
  return "?";
}

std::string_view to_string(FilterReason r) {
  switch (r) {
    case FilterReason::ok: return "ok";
    case FilterReason::pink_before_final: return "pink_before_final";
    case FilterReason::pink_absent_prefinal: return "pink_absent_prefinal";
    case FilterReason::pink_in_revision: return "pink_in_revision";
    case FilterReason::malformed: return "malformed";
  }
  return "?";
}

FilterReason parse_filter_reason(std::string_view s) {
  for (auto r : {FilterReason::ok, FilterReason::pink_before_final, FilterReason::pink_absent_prefinal,
                 FilterReason::pink_in_revision, FilterReason::malformed}) {
    if (to_string(r) == s) return r;
  }
  throw SchemaError("unknown filter reason '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const FilterOutcome& v) {
  j = {{"v", core::kSchemaVersion},   {"dialogue_id", v.dialogue_id}, {"kept", v.kept},
       {"reason", to_string(v.reason)}, {"evidence", v.evidence},       {"problems", v.problems}};
}

void from_json(const nlohmann::json& j, FilterOutcome& v) {
  core::check_version(j);
  j.at("dialogue_id").get_to(v.dialogue_id);
  j.at("kept").get_to(v.kept);
  v.reason = parse_filter_reason(j.at("reason").get<std::string>());
  j.at("evidence").get_to(v.evidence);
  v.problems = j.value("problems", std::vector<std::string>{});
  if (v.kept != (v.reason == FilterReason::ok)) throw SchemaError("kept must equal (reason == ok)");
}

Truncation truncate_at_first_agent_mention(const core::Dialogue& d, std::string_view pink,
                                           const MentionDetector& detector) {
  Truncation out{d, TruncationFlag::no_agent_mention, d.turns.size()};
  for (std::size_t i = 0; i < d.turns.size(); ++i) {
    if (d.turns[i].role != core::Role::agent) continue;
    if (!detector.detect(d.turns[i].text, pink, Scope::sentences).matched) continue;
    if (i + 1 == d.turns.size()) {
      out.flag = TruncationFlag::unchanged_terminal;
    } else {
      out.dialogue.turns.resize(i + 1);
      out.flag = TruncationFlag::truncated;
    }
    break;
  }
  return out;
}

FilterOutcome filter_pair(const core::Dialogue& d, const core::RevisionRecord& revision, std::string_view pink,
                          const MentionDetector& detector) {
  FilterOutcome out;
  out.dialogue_id = d.id;
  out.problems = core::validate(d);
  for (auto& p : core::validate(revision)) out.problems.push_back(std::move(p));
  if (revision.dialogue_id != d.id) out.problems.push_back("dialogue_id: revision belongs to another dialogue");
  if (out.problems.empty()) {
    for (auto& p : core::validate(revision, d)) out.problems.push_back(std::move(p));
  }
  if (text::normalize(pink).empty()) out.problems.push_back("pink: must be non-empty");
  if (!out.problems.empty()) return out;

  for (std::size_t i = 0; i + 1 < d.turns.size(); ++i) {
    if (d.turns[i].role != core::Role::agent) continue;
    auto v = detector.detect(d.turns[i].text, pink, Scope::sentences);
    out.evidence.push_back(v);
    if (v.matched) {
      out.reason = FilterReason::pink_before_final;
      return out;
    }
  }
  auto original = detector.detect(revision.original_final, pink, Scope::utterance);
  out.evidence.push_back(original);
  if (!original.matched) {
    out.reason = FilterReason::pink_absent_prefinal;
    return out;
  }
  auto revised = detector.detect(revision.revised_final, pink, Scope::utterance);
  out.evidence.push_back(revised);
  if (revised.matched) {
    out.reason = FilterReason::pink_in_revision;
    return out;
  }
  out.kept = true;
  out.reason = FilterReason::ok;
  return out;
}

}  // namespace dpf::cleanse
