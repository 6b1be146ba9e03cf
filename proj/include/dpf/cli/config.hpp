#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpf/cleanse/mention.hpp"
#include "dpf/core/jsonl.hpp"
#include "dpf/dataset/export.hpp"
#include "dpf/dataset/split.hpp"
#include "dpf/error.hpp"
#include "dpf/eval/harness.hpp"
#include "dpf/genpipe/stages.hpp"
#include "dpf/llmio/types.hpp"

namespace dpf::cli {

class ConfigInvalid : public Error {
public:
  using Error::Error;
};

// Backend roles a run configures; every role must be present.
inline const std::vector<std::string> kBackendRoles{"topic_model", "generator", "embedder", "eval_model", "judge"};

struct RunConfig {
  fs::path run_dir;
  std::uint64_t seed = 0;
  std::map<std::string, llmio::BackendConfig> backends;

  std::size_t n_topics = 20;
  std::size_t n_attributes = 10;
  std::size_t n_dialogues = 100;
  std::vector<std::string> manual_topics;
  genpipe::GenOptions gen;

  cleanse::FilterConfig filter;
  bool use_embeddings = true;

  dataset::SplitConfig split;
  std::vector<dataset::ExportFormat> export_formats{dataset::ExportFormat::dpo_jsonl,
                                                    dataset::ExportFormat::chat_transcript};
  std::string avoidance_template = std::string(dataset::kDefaultAvoidanceTemplate);
  dataset::TrainingConfig training;

  eval::EvalOptions eval;

  // The parsed file, with --seed applied; stage hashes are computed from it.
  nlohmann::json source;
};

// Relative paths (run_dir, template files) resolve against the config file's
// directory. Unknown keys are errors. Throws ConfigInvalid.
RunConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig parse_config(const nlohmann::json& j, const fs::path& base_dir,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

// Hash of the config sections and template texts a stage reads, so editing
// an unrelated section leaves its cache intact.
std::string stage_config_hash(const RunConfig& cfg, const std::string& stage);

}  // namespace dpf::cli
