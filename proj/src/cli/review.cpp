#include "dpf/cli/review.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "dpf/core/text.hpp"

namespace dpf::cli {
namespace {

ReviewSummary tally(const std::vector<ReviewItem>& items, const ReviewJournal& journal) {
  ReviewSummary s;
  for (const auto& it : items) {
    auto st = journal.status(it.id);
    if (!st || *st == core::ReviewStatus::candidate) {
      ++s.undecided;
    } else if (*st == core::ReviewStatus::approved) {
      ++s.approved;
    } else {
      ++s.rejected;
    }
  }
  return s;
}

bool decided(const ReviewJournal& j, const core::Id& id) {
  auto s = j.status(id);
  return s && *s != core::ReviewStatus::candidate;
}

}  // namespace

Decision parse_decision(const std::string& raw) {
  auto s = text::normalize(raw);
  if (s == "a" || s == "accept" || s == "approve" || s == "approved") return Decision::approve;
  if (s == "r" || s == "reject" || s == "rejected") return Decision::reject;
  if (s == "s" || s == "skip") return Decision::skip;
  throw std::invalid_argument("unknown review decision '" + raw + "'");
}

std::vector<DecisionRule> load_decisions(const fs::path& path) {
  std::vector<DecisionRule> out;
  auto values = read_jsonl_values(path);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& v = values[i];
    try {
      out.push_back({v.at("match").get<std::string>(), parse_decision(v.at("decision").get<std::string>())});
    } catch (const std::exception& e) {
      throw SchemaError(path.string() + ": rule " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

ReviewJournal::ReviewJournal(fs::path path) : path_(std::move(path)) {
  if (!fs::exists(path_)) return;
  for (const auto& v : read_jsonl_values(path_)) {
    decided_[v.at("id").get<std::string>()] = core::parse_review_status(v.at("status").get<std::string>());
  }
}

std::optional<core::ReviewStatus> ReviewJournal::status(const core::Id& id) const {
  auto it = decided_.find(id);
  if (it == decided_.end()) return std::nullopt;
  return it->second;
}

void ReviewJournal::record(const core::Id& id, core::ReviewStatus s) {
  JsonlAppender(path_).append({{"id", id}, {"status", core::to_string(s)}});
  decided_[id] = s;
}

ReviewSummary review_with_rules(const std::vector<ReviewItem>& items, const std::vector<DecisionRule>& rules,
                                ReviewJournal& journal) {
  for (const auto& it : items) {
    if (decided(journal, it.id)) continue;
    const auto key = text::normalize(it.text);
    for (const auto& r : rules) {
      if (r.match != "*" && r.match != it.id && text::normalize(r.match) != key) continue;
      if (r.decision == Decision::approve) journal.record(it.id, core::ReviewStatus::approved);
      if (r.decision == Decision::reject) journal.record(it.id, core::ReviewStatus::rejected);
      break;
    }
  }
  return tally(items, journal);
}

ReviewSummary review_interactive(const std::vector<ReviewItem>& items, ReviewJournal& journal, std::istream& in,
                                 std::ostream& out) {
  std::vector<const ReviewItem*> pending;
  for (const auto& it : items) {
    if (!decided(journal, it.id)) pending.push_back(&it);
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto& it = *pending[i];
    bool next = false;
    while (!next) {
      out << "[" << i + 1 << "/" << pending.size() << "] " << it.text << "\n  (a)ccept (r)eject (s)kip (q)uit > "
          << std::flush;
      std::string line;
      if (!std::getline(in, line)) return tally(items, journal);
      auto k = text::normalize(line);
      if (k == "q" || k == "quit") return tally(items, journal);
      try {
        auto d = parse_decision(k);
        if (d == Decision::approve) journal.record(it.id, core::ReviewStatus::approved);
        if (d == Decision::reject) journal.record(it.id, core::ReviewStatus::rejected);
        next = true;
      } catch (const std::invalid_argument&) {
        out << "  please answer a, r, s or q\n";
      }
    }
  }
  return tally(items, journal);
}

}  // namespace dpf::cli
