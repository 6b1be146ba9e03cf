#include "dpf/core/validate.hpp"

#include <cmath>

#include "dpf/core/text.hpp"

namespace dpf::core {
namespace {

bool blank(const std::string& s) { return text::normalize(s).empty(); }

void check_id(std::vector<std::string>& out, const std::string& id, const char* field) {
  if (id.empty()) out.push_back(std::string(field) + ": must be non-empty");
}

bool proportion(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }
bool nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

std::vector<std::string> validate(const Topic& t) {
  std::vector<std::string> out;
  check_id(out, t.id, "id");
  if (blank(t.text)) out.push_back("text: must be non-empty after whitespace normalization");
  return out;
}

std::vector<std::string> validate(const PinkElephantPair& p) {
  std::vector<std::string> out;
  check_id(out, p.id, "id");
  check_id(out, p.topic_id, "topic_id");
  if (blank(p.pink)) out.push_back("pink: must be non-empty");
  if (blank(p.grey)) out.push_back("grey: must be non-empty");
  if (!blank(p.pink) && text::normalize(p.pink) == text::normalize(p.grey)) {
    out.push_back("pink ≠ grey after normalization");
  }
  return out;
}

std::vector<std::string> validate(const Attribute& a) {
  std::vector<std::string> out;
  check_id(out, a.id, "id");
  if (blank(a.text)) out.push_back("text: must be non-empty");
  return out;
}

std::vector<std::string> validate(const Turn& t) {
  std::vector<std::string> out;
  if (blank(t.text)) out.push_back("text: must be non-empty");
  return out;
}

std::vector<std::string> validate(const Dialogue& d) {
  std::vector<std::string> out;
  check_id(out, d.id, "id");
  check_id(out, d.pep_id, "pep_id");
  check_id(out, d.attribute_id, "attribute_id");
  if (d.turns.empty()) {
    out.push_back("turns: must be non-empty");
    return out;
  }
  for (std::size_t i = 0; i < d.turns.size(); ++i) {
    if (blank(d.turns[i].text)) out.push_back("turns[" + std::to_string(i) + "].text: must be non-empty");
  }
  for (std::size_t i = 1; i < d.turns.size(); ++i) {
    if (d.turns[i].role == d.turns[i - 1].role) {
      out.push_back("turns: roles must alternate");
      break;
    }
  }
  if (d.turns.back().role != Role::agent) out.push_back("turns: final turn must be agent");
  if (!d.plan.empty() && d.plan.size() < 2) out.push_back("plan: must have at least 2 steps when present");
  return out;
}

std::vector<std::string> validate(const RevisionRecord& r) {
  std::vector<std::string> out;
  check_id(out, r.dialogue_id, "dialogue_id");
  if (blank(r.critique)) out.push_back("critique: must be non-empty");
  if (blank(r.revised_final)) out.push_back("revised_final: must be non-empty");
  if (blank(r.original_final)) out.push_back("original_final: must be non-empty");
  return out;
}

std::vector<std::string> validate(const RevisionRecord& r, const Dialogue& d) {
  auto out = validate(r);
  if (r.dialogue_id != d.id) out.push_back("dialogue_id: does not reference this dialogue");
  if (d.turns.empty() || d.turns.back().role != Role::agent || d.turns.back().text != r.original_final) {
    out.push_back("original_final: must equal the dialogue's final agent turn");
  }
  return out;
}

std::vector<std::string> validate(const PreferencePair& p) {
  std::vector<std::string> out;
  check_id(out, p.id, "id");
  check_id(out, p.pep_id, "pep_id");
  if (blank(p.system_prompt)) out.push_back("system_prompt: must be non-empty");
  if (blank(p.rejected)) out.push_back("rejected: must be non-empty");
  if (blank(p.chosen)) out.push_back("chosen: must be non-empty");
  if (text::normalize(p.rejected) == text::normalize(p.chosen)) out.push_back("rejected ≠ chosen");
  if (p.context.empty() || p.context.back().role != Role::user) {
    out.push_back("context: last turn must be user");
  }
  for (std::size_t i = 1; i < p.context.size(); ++i) {
    if (p.context[i].role == p.context[i - 1].role) {
      out.push_back("context: roles must alternate");
      break;
    }
  }
  return out;
}

std::vector<std::string> validate(const MentionVerdict& v) {
  std::vector<std::string> out;
  if (!std::isfinite(v.score)) out.push_back("score: must be finite");
  if (v.span && v.span->end < v.span->start) out.push_back("span: end before start");
  return out;
}

std::vector<std::string> validate(const EvalRecord& r) {
  std::vector<std::string> out;
  check_id(out, r.dialogue_id, "dialogue_id");
  auto verdict = text::extract_verdict(r.judge_raw);
  if (!verdict) {
    out.push_back("judge_raw: contains no yes/no verdict");
  } else if (*verdict != r.judge_label) {
    out.push_back("judge_label: disagrees with judge_raw");
  }
  return out;
}

std::vector<std::string> validate(const MetricsReport& m) {
  std::vector<std::string> out;
  if (!proportion(m.base_rate)) out.push_back("base_rate: must be in [0, 1]");
  if (!proportion(m.with_prompt)) out.push_back("with_prompt: must be in [0, 1]");
  if (!nonneg(m.base_rate_se)) out.push_back("base_rate_se: must be >= 0");
  if (!nonneg(m.with_prompt_se)) out.push_back("with_prompt_se: must be >= 0");
  if (!nonneg(m.delta_se)) out.push_back("delta_se: must be >= 0");
  if (m.delta != m.base_rate - m.with_prompt) out.push_back("delta: must equal base_rate - with_prompt");
  return out;
}

}  // namespace dpf::core
