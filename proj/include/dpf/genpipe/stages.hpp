#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dpf/core/types.hpp"
#include "dpf/genpipe/parse.hpp"
#include "dpf/genpipe/prompts.hpp"
#include "dpf/llmio/client.hpp"

namespace dpf::genpipe {

// Turn count outside [min_turns, max_turns].
class DialogueLengthError : public GenError {
public:
  using GenError::GenError;
};

// Some best-of-n candidates failed. Picking among the survivors would make
// the output depend on which requests happened to fail, so the item is
// treated as failed and can be retried.
class IncompleteSelection : public GenError {
public:
  using GenError::GenError;
};

struct GenOptions {
  PromptSet prompts = PromptSet::defaults();
  std::uint64_t seed = 0;
  double list_temperature = 1.0;
  double dialogue_temperature = 1.0;
  double edit_temperature = 0.7;
  std::size_t max_tokens = 1024;
  std::size_t best_of_n = 2;
  bool emit_swapped = false;
  std::size_t min_turns = 4;
  std::size_t max_turns = 20;
};

// Deduplicated candidate topics, at most n. Throws UnparseableList when fewer
// than 3 items can be extracted.
std::vector<core::Topic> gen_topics(std::size_t n, const llmio::Client& client, const GenOptions& opts);

// Candidate pairs for an approved topic, deduplicated on the unordered
// normalized pair; pairs with pink == grey are dropped. With emit_swapped each
// pair is followed by its reverse orientation.
std::vector<core::PinkElephantPair> gen_peps(const core::Topic& topic, const llmio::Client& client,
                                             const GenOptions& opts);

std::vector<core::Attribute> gen_attributes(std::size_t n, const llmio::Client& client, const GenOptions& opts);

llmio::ChatRequest dialogue_request(const core::PinkElephantPair& pep, const core::Attribute& attribute,
                                    const core::Topic& topic, const GenOptions& opts, std::size_t ordinal);

// Best-of-N generation of a planned dialogue ending in an agent turn. Throws
// ParseError, RoleOrderError, or DialogueLengthError for unusable output, and
// IncompleteSelection when any candidate request failed.
core::Dialogue gen_dialogue(const core::PinkElephantPair& pep, const core::Attribute& attribute,
                            const core::Topic& topic, const llmio::Client& client, const GenOptions& opts,
                            std::size_t ordinal);

// The plan is never part of these prompts.
llmio::ChatRequest critique_request(const core::Dialogue& d, const core::PinkElephantPair& pep,
                                    const GenOptions& opts);
llmio::ChatRequest revision_request(const core::Dialogue& d, const core::PinkElephantPair& pep,
                                    const std::string& critique, const GenOptions& opts);

// An empty completion is retried once with a new seed, then EmptyCompletion.
std::string critique(const core::Dialogue& d, const core::PinkElephantPair& pep, const llmio::Client& client,
                     const GenOptions& opts);

core::RevisionRecord revise(const core::Dialogue& d, const core::PinkElephantPair& pep, const std::string& critique,
                            const llmio::Client& client, const GenOptions& opts);

}  // namespace dpf::genpipe
