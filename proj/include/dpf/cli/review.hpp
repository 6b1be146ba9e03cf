#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpf/core/jsonl.hpp"
#include "dpf/core/types.hpp"

namespace dpf::cli {

enum class Decision { approve, reject, skip };
Decision parse_decision(const std::string& s);  // accept/approve/a, reject/r, skip/s

// One line of a decisions file: {"match": "<id | text | *>", "decision": "..."}.
// Text matches compare normalized forms. The first matching rule wins.
struct DecisionRule {
  std::string match;
  Decision decision = Decision::skip;
};
std::vector<DecisionRule> load_decisions(const fs::path& path);

struct ReviewItem {
  core::Id id;
  std::string text;  // shown to the reviewer and matched by rules
};

// Decisions already taken, persisted one JSONL line per decision as soon as
// it is made. A later line for the same id overrides an earlier one.
class ReviewJournal {
public:
  explicit ReviewJournal(fs::path path);
  std::optional<core::ReviewStatus> status(const core::Id& id) const;
  void record(const core::Id& id, core::ReviewStatus s);
  std::size_t size() const { return decided_.size(); }

private:
  fs::path path_;
  std::map<core::Id, core::ReviewStatus> decided_;
};

struct ReviewSummary {
  std::size_t approved = 0;
  std::size_t rejected = 0;
  std::size_t undecided = 0;
};

// Batch mode: applies the rules to every undecided item.
ReviewSummary review_with_rules(const std::vector<ReviewItem>& items, const std::vector<DecisionRule>& rules,
                                ReviewJournal& journal);

// Interactive mode: presents undecided items in order and reads a/r/s/q.
// End of input behaves like q.
ReviewSummary review_interactive(const std::vector<ReviewItem>& items, ReviewJournal& journal, std::istream& in,
                                 std::ostream& out);

}  // namespace dpf::cli
