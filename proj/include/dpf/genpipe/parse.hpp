#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpf/core/types.hpp"
#include "dpf/error.hpp"

namespace dpf::genpipe {

class GenError : public Error {
public:
  using Error::Error;
};

class ParseError : public GenError {
public:
  using GenError::GenError;
};

// Consecutive same-role turns, a leading AGENT turn, or a trailing USER turn.
class RoleOrderError : public ParseError {
public:
  using ParseError::ParseError;
};

class UnparseableList : public GenError {
public:
  using GenError::GenError;
};

class EmptyCompletion : public GenError {
public:
  using GenError::GenError;
};

struct PlanDialogue {
  std::vector<std::string> plan;
  std::vector<core::Turn> turns;

  bool operator==(const PlanDialogue&) const = default;
};

// Parses
//
//   Plan:
//   1. step
//   2. step
//   ---
//   USER: ...
//   AGENT: ...
//
// The "Plan:" header is optional. The plan must be numbered 1..N with N >= 2.
// The dialogue starts after the first line that is exactly "---" once
// trimmed. Unprefixed lines in the dialogue continue the previous turn and
// are joined with a single space.
PlanDialogue parse_plan_dialogue(std::string_view raw);

// Inverse of parse_plan_dialogue on trimmed single-line steps and turns.
std::string format_plan_dialogue(const PlanDialogue& pd);

// "USER: ...\nAGENT: ..." with no plan; the form shown to critique/revision.
std::string format_transcript(const std::vector<core::Turn>& turns);

// Items of a numbered, bulleted, or line-separated list. When any line is
// numbered or bulleted, only those lines count.
std::vector<std::string> parse_list(std::string_view raw);

// "(x, y)" or "x, y" lines, split at the first comma.
std::vector<std::pair<std::string, std::string>> parse_pairs(std::string_view raw);

}  // namespace dpf::genpipe
