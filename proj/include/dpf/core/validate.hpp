#pragma once

#include <string>
#include <vector>

#include "dpf/core/types.hpp"

namespace dpf::core {

// Each overload returns one "field: rule" description per broken invariant;
// an empty result means the record is well formed.
std::vector<std::string> validate(const Topic&);
std::vector<std::string> validate(const PinkElephantPair&);
std::vector<std::string> validate(const Attribute&);
std::vector<std::string> validate(const Turn&);
std::vector<std::string> validate(const Dialogue&);
std::vector<std::string> validate(const RevisionRecord&);
std::vector<std::string> validate(const PreferencePair&);
std::vector<std::string> validate(const MentionVerdict&);
std::vector<std::string> validate(const EvalRecord&);
std::vector<std::string> validate(const MetricsReport&);

// Cross-record rule: original_final must equal the dialogue's final agent turn.
std::vector<std::string> validate(const RevisionRecord&, const Dialogue&);

}  // namespace dpf::core
