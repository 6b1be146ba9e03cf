#include "dpf/dataset/pairs.hpp"

#include <stdexcept>

#include "dpf/core/hash.hpp"
#include "dpf/core/text.hpp"

namespace dpf::dataset {

std::string render_avoidance_prompt(std::string_view tmpl, const core::PinkElephantPair& pep) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.substr(i).starts_with("{pink}")) {
      out += pep.pink;
      i += 6;
    } else if (tmpl.substr(i).starts_with("{grey}")) {
      out += pep.grey;
      i += 6;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

core::PreferencePair build_preference_pair(const core::Dialogue& d, const core::RevisionRecord& revision,
                                           const core::PinkElephantPair& pep, core::Split split,
                                           std::string_view prompt_template) {
  if (revision.dialogue_id != d.id) throw std::invalid_argument("revision does not belong to dialogue " + d.id);
  if (d.pep_id != pep.id) throw std::invalid_argument("dialogue " + d.id + " was not generated from pep " + pep.id);
  if (d.turns.size() < 2 || d.turns.back().role != core::Role::agent) {
    throw std::invalid_argument("dialogue " + d.id + " must end with an agent turn after a user turn");
  }
  if (text::normalize(revision.original_final) == text::normalize(revision.revised_final)) {
    throw DegeneratePair("dialogue " + d.id + ": revision equals original");
  }
  core::PreferencePair p;
  p.id = content_id("pair", {d.id});
  p.pep_id = pep.id;
  p.system_prompt = render_avoidance_prompt(prompt_template, pep);
  p.context.assign(d.turns.begin(), d.turns.end() - 1);
  p.rejected = revision.original_final;
  p.chosen = revision.revised_final;
  p.split = split;
  return p;
}

}  // namespace dpf::dataset
