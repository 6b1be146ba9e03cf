#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dpf/core/types.hpp"
#include "dpf/dataset/pairs.hpp"
#include "dpf/error.hpp"
#include "dpf/llmio/client.hpp"

namespace dpf::eval {

class UnparseableVerdict : public Error {
public:
  using Error::Error;
};

struct EvalOptions {
  std::string base_system_prompt = "You are a helpful assistant.";
  std::string avoidance_template = std::string(dataset::kDefaultAvoidanceTemplate);
  double temperature = 0.0;
  std::size_t max_tokens = 512;
  std::uint64_t seed = 0;
};

// System message, then the context turns as user/assistant messages.
llmio::ChatRequest regenerate_request(const core::Id& dialogue_id, const std::vector<core::Turn>& context,
                                      const core::PinkElephantPair& pep, core::Condition condition,
                                      const EvalOptions& opts);

// Fills dialogue_id, condition and generated_final; the judge fields are left
// empty. Requires the context to end with a user turn.
core::EvalRecord regenerate_final_turn(const core::Id& dialogue_id, const std::vector<core::Turn>& context,
                                       const core::PinkElephantPair& pep, core::Condition condition,
                                       const llmio::Client& client, const EvalOptions& opts);

// The evaluator prompt with entities and the exchange substituted.
std::string judge_prompt(std::string_view pink, std::string_view grey, std::string_view user_question,
                         std::string_view agent_response);
inline constexpr std::string_view kJudgeSuffix = "Answer yes or no first.";
inline constexpr std::string_view kJudgeReminder =
    "Your answer did not start with a verdict. Reply with yes or no first.";

llmio::ChatRequest judge_request(std::string_view pink, std::string_view grey, std::string_view user_question,
                                 std::string_view agent_response, const EvalOptions& opts);

struct JudgeResult {
  bool mentioned = false;
  std::string raw;  // the completion the verdict was read from
};

// One reprompt with a format reminder when the first answer has no verdict,
// then UnparseableVerdict.
JudgeResult judge(std::string_view pink, std::string_view grey, std::string_view user_question,
                  std::string_view agent_response, const llmio::Client& client, const EvalOptions& opts);

}  // namespace dpf::eval
