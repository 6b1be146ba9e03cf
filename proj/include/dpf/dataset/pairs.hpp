#pragma once

#include <string>
#include <string_view>

#include "dpf/core/types.hpp"
#include "dpf/error.hpp"

namespace dpf::dataset {

class DegeneratePair : public Error {
public:
  using Error::Error;
};

inline constexpr std::string_view kDefaultAvoidanceTemplate =
    "You must not mention or discuss {pink}. If it comes up, steer the conversation to {grey}.";

// Substitutes {pink} and {grey}; other braces are left alone.
std::string render_avoidance_prompt(std::string_view tmpl, const core::PinkElephantPair& pep);

// Context is every turn but the final agent turn. Throws DegeneratePair when
// the revision equals the original after normalization, and
// std::invalid_argument when the records do not belong together.
core::PreferencePair build_preference_pair(const core::Dialogue& d, const core::RevisionRecord& revision,
                                           const core::PinkElephantPair& pep, core::Split split,
                                           std::string_view prompt_template = kDefaultAvoidanceTemplate);

}  // namespace dpf::dataset
