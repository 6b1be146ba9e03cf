#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "dpf/core/jsonl.hpp"

namespace dpf::cli {

struct StageCounts {
  std::size_t input = 0;
  std::size_t output = 0;
  std::map<std::string, std::size_t> rejected;  // reason -> count
  std::map<std::string, std::size_t> info;      // extra tallies, not part of conservation

  std::size_t rejected_total() const;
  bool conserved() const { return input == output + rejected_total(); }
};

// Everything needed to decide whether a stage's outputs are current. Timings
// go to a sibling file so manifests stay byte-deterministic.
struct Manifest {
  std::string stage;
  std::string status = "complete";  // or "partial"
  std::string cache_key;
  std::string config_hash;
  std::map<std::string, std::string> inputs;   // run-dir relative path -> sha256
  std::map<std::string, std::string> outputs;
  StageCounts counts;
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);

fs::path manifest_path(const fs::path& run_dir, const std::string& stage);
std::optional<Manifest> read_manifest(const fs::path& run_dir, const std::string& stage);
void write_manifest(const fs::path& run_dir, const Manifest& m);
void write_timing(const fs::path& run_dir, const std::string& stage, double seconds);

std::string hash_file(const fs::path& path);

// True when the manifest is complete, has this cache key, and every output
// still exists with the recorded hash.
bool outputs_current(const fs::path& run_dir, const Manifest& m, const std::string& cache_key);

}  // namespace dpf::cli
