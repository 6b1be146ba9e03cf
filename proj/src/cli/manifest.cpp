#include "dpf/cli/manifest.hpp"

#include "dpf/core/hash.hpp"
#include "dpf/core/serialize.hpp"

namespace dpf::cli {

using nlohmann::json;

std::size_t StageCounts::rejected_total() const {
  std::size_t n = 0;
  for (const auto& [reason, k] : rejected) n += k;
  return n;
}

json to_json(const Manifest& m) {
  return {{"v", core::kSchemaVersion},
          {"stage", m.stage},
          {"status", m.status},
          {"cache_key", m.cache_key},
          {"config_hash", m.config_hash},
          {"inputs", m.inputs},
          {"outputs", m.outputs},
          {"counts",
           {{"input", m.counts.input},
            {"output", m.counts.output},
            {"rejected", m.counts.rejected},
            {"info", m.counts.info}}}};
}

Manifest manifest_from_json(const json& j) {
  core::check_version(j);
  Manifest m;
  try {
    m.stage = j.at("stage").get<std::string>();
    m.status = j.at("status").get<std::string>();
    m.cache_key = j.at("cache_key").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    const auto& c = j.at("counts");
    m.counts.input = c.at("input").get<std::size_t>();
    m.counts.output = c.at("output").get<std::size_t>();
    m.counts.rejected = c.at("rejected").get<std::map<std::string, std::size_t>>();
    m.counts.info = c.value("info", std::map<std::string, std::size_t>{});
  } catch (const json::exception& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  }
  return m;
}

fs::path manifest_path(const fs::path& run_dir, const std::string& stage) {
  return run_dir / "manifests" / (stage + ".json");
}

std::optional<Manifest> read_manifest(const fs::path& run_dir, const std::string& stage) {
  auto p = manifest_path(run_dir, stage);
  if (!fs::exists(p)) return std::nullopt;
  try {
    return manifest_from_json(json::parse(read_file(p)));
  } catch (const json::exception&) {
    return std::nullopt;
  } catch (const SchemaError&) {
    return std::nullopt;
  }
}

void write_manifest(const fs::path& run_dir, const Manifest& m) {
  write_file_atomic(manifest_path(run_dir, m.stage), to_json(m).dump(2) + "\n");
}

void write_timing(const fs::path& run_dir, const std::string& stage, double seconds) {
  write_file_atomic(run_dir / "manifests" / (stage + ".timing.json"),
                    json{{"stage", stage}, {"seconds", seconds}}.dump() + "\n");
}

std::string hash_file(const fs::path& path) { return sha256_hex(read_file(path)); }

bool outputs_current(const fs::path& run_dir, const Manifest& m, const std::string& cache_key) {
  if (m.status != "complete" || m.cache_key != cache_key) return false;
  for (const auto& [rel, sha] : m.outputs) {
    auto p = run_dir / rel;
    if (!fs::exists(p) || hash_file(p) != sha) return false;
  }
  return true;
}

}  // namespace dpf::cli
