#pragma once

// Request tags shared by the stage code and the mock response table.
namespace dpf::llmio::tags {

inline constexpr const char* kTopics = "topics";
inline constexpr const char* kPeps = "peps";
inline constexpr const char* kAttributes = "attributes";
inline constexpr const char* kDialogue = "dialogue";
inline constexpr const char* kCritique = "critique";
inline constexpr const char* kRevision = "revision";
inline constexpr const char* kEvalTurn = "eval_turn";
inline constexpr const char* kJudge = "judge";

}  // namespace dpf::llmio::tags
