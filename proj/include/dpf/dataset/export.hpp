#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpf/core/jsonl.hpp"
#include "dpf/core/types.hpp"

namespace dpf::dataset {

enum class ExportFormat { dpo_jsonl, chat_transcript };
std::string_view to_string(ExportFormat);
ExportFormat parse_export_format(std::string_view);

// Extra provenance merged into each record's "meta", keyed by pair id.
using Provenance = std::map<core::Id, nlohmann::json>;

// dpo_jsonl line: {"v","id","system","messages","chosen","rejected","meta"}.
// messages use "user"/"assistant" roles; meta always holds pep_id and split.
nlohmann::json to_dpo_record(const core::PreferencePair& p, const nlohmann::json& extra_meta = nullptr);
core::PreferencePair from_dpo_record(const nlohmann::json& j);

// Byte-deterministic for a given input order. An empty dpo_jsonl export is a
// single comment line; otherwise the file is pure JSONL.
std::string render_export(const std::vector<core::PreferencePair>& pairs, ExportFormat format,
                          const Provenance& provenance = {});
void export_pairs(const std::vector<core::PreferencePair>& pairs, const fs::path& path, ExportFormat format,
                  const Provenance& provenance = {});

std::vector<core::PreferencePair> import_dpo_jsonl(const fs::path& path);

// Hyperparameters for the external DPO trainer.
struct TrainingConfig {
  double beta = 0.5;
  int epochs = 1;
  int global_batch_size = 64;
  std::string optimizer = "rmsprop";
  std::string precision = "bfloat16";
};
nlohmann::json to_json(const TrainingConfig& cfg);

}  // namespace dpf::dataset
