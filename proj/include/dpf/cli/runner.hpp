#pragma once

#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "dpf/cli/config.hpp"
#include "dpf/cli/dag.hpp"
#include "dpf/cli/manifest.hpp"
#include "dpf/llmio/client.hpp"

namespace dpf::cli {

// Some items failed; completed ones are journaled for --resume.
class PartialFailure : public Error {
public:
  using Error::Error;
};

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kUpstreamMissing = 3, kPartial = 4 };

struct RunOptions {
  bool resume = false;
  std::optional<fs::path> decisions;  // batch review instead of the terminal loop
  std::istream* in = &std::cin;
  std::ostream* out = &std::cout;
};

// Builds the backend for a role; the default is llmio::make_backend.
using BackendFactory =
    std::function<std::shared_ptr<llmio::Backend>(const std::string& role, const llmio::BackendConfig& cfg)>;

// Artifact names inside the run directory.
namespace files {
inline constexpr const char* kTopics = "topics.jsonl";
inline constexpr const char* kTopicsReviewed = "topics_reviewed.jsonl";
inline constexpr const char* kPeps = "peps.jsonl";
inline constexpr const char* kPepsReviewed = "peps_reviewed.jsonl";
inline constexpr const char* kAttributes = "attributes.jsonl";
inline constexpr const char* kDialogues = "dialogues.jsonl";
inline constexpr const char* kDialoguesRejected = "dialogues_rejected.jsonl";
inline constexpr const char* kTruncated = "dialogues_truncated.jsonl";
inline constexpr const char* kTruncations = "truncations.jsonl";
inline constexpr const char* kRevisions = "revisions.jsonl";
inline constexpr const char* kRevisionsRejected = "revisions_rejected.jsonl";
inline constexpr const char* kFilterReport = "filter_report.jsonl";
inline constexpr const char* kSplit = "split.json";
inline constexpr const char* kPairs = "pairs.jsonl";
inline constexpr const char* kPairsDropped = "pairs_dropped.jsonl";
inline constexpr const char* kDpoConfig = "export/dpo_config.json";
inline constexpr const char* kEvalRecords = "eval_records.jsonl";
inline constexpr const char* kAnnotation = "annotation.csv";
inline constexpr const char* kAnnotationKey = "annotation_key.jsonl";
inline constexpr const char* kMetrics = "metrics.json";
inline constexpr const char* kReport = "report.md";
}  // namespace files

class Runner {
public:
  // Checks the stage graph for cycles.
  explicit Runner(RunConfig cfg, BackendFactory factory = {});

  // Runs one stage and maps failures onto exit codes.
  int run(const std::string& stage, const RunOptions& opts = {});

  // Throws MissingUpstream, PartialFailure, ConfigInvalid or other errors.
  // Returns the stage's counts (from the manifest on a cache hit).
  StageCounts run_stage(const std::string& stage, const RunOptions& opts = {});

  // Whether the last run_stage call was served from cache.
  bool last_was_cache_hit() const { return last_cache_hit_; }

  const RunConfig& config() const { return cfg_; }
  const llmio::Client& client(const std::string& role);
  fs::path path(const std::string& rel) const { return cfg_.run_dir / rel; }

  struct Output {
    std::vector<std::string> files;  // run-dir relative
    StageCounts counts;
  };

private:
  Output topics();
  Output review(const std::string& kind, const RunOptions& opts);
  Output peps();
  Output attributes();
  Output dialogues(const std::string& key, bool resume);
  Output critique_revise(const std::string& key, bool resume);
  Output filter();
  Output split();
  Output export_stage();
  Output evaluate(const std::string& key, bool resume);
  Output report();

  RunConfig cfg_;
  BackendFactory factory_;
  std::mutex clients_mu_;
  std::map<std::string, std::unique_ptr<llmio::Client>> clients_;
  bool last_cache_hit_ = false;
};

// Files a stage reads; their hashes enter the cache key.
std::vector<std::string> stage_reads(const std::string& stage);

}  // namespace dpf::cli
