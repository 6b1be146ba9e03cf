#include "dpf/dataset/export.hpp"

#include <stdexcept>

#include "dpf/core/serialize.hpp"

namespace dpf::dataset {
namespace {

using nlohmann::json;

std::string role_name(core::Role r) { return r == core::Role::user ? "user" : "assistant"; }

core::Role parse_message_role(const std::string& s) {
  if (s == "user") return core::Role::user;
  if (s == "assistant") return core::Role::agent;
  throw SchemaError("messages: unknown role '" + s + "'");
}

std::string transcript_block(const core::PreferencePair& p) {
  std::string out = "=== " + p.id + " split=" + std::string(core::to_string(p.split)) + " pep=" + p.pep_id + "\n";
  out += "SYSTEM: " + p.system_prompt + "\n";
  for (const auto& t : p.context) out += (t.role == core::Role::user ? "USER: " : "AGENT: ") + t.text + "\n";
  out += "REJECTED: " + p.rejected + "\n";
  out += "CHOSEN: " + p.chosen + "\n\n";
  return out;
}

}  // namespace

std::string_view to_string(ExportFormat f) { return f == ExportFormat::dpo_jsonl ? "dpo_jsonl" : "chat_transcript"; }

ExportFormat parse_export_format(std::string_view s) {
  if (s == "dpo_jsonl") return ExportFormat::dpo_jsonl;
  if (s == "chat_transcript") return ExportFormat::chat_transcript;
  throw std::invalid_argument("unknown export format '" + std::string(s) + "'");
}

json to_dpo_record(const core::PreferencePair& p, const json& extra_meta) {
  json messages = json::array();
  for (const auto& t : p.context) messages.push_back({{"role", role_name(t.role)}, {"content", t.text}});
  json meta = extra_meta.is_object() ? extra_meta : json::object();
  meta["pep_id"] = p.pep_id;
  meta["split"] = core::to_string(p.split);
  return {{"v", core::kSchemaVersion}, {"id", p.id},         {"system", p.system_prompt}, {"messages", messages},
          {"chosen", p.chosen},        {"rejected", p.rejected}, {"meta", meta}};
}

core::PreferencePair from_dpo_record(const json& j) {
  core::check_version(j);
  core::PreferencePair p;
  try {
    p.id = j.at("id").get<std::string>();
    p.system_prompt = j.at("system").get<std::string>();
    for (const auto& m : j.at("messages")) {
      p.context.push_back({parse_message_role(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    }
    p.chosen = j.at("chosen").get<std::string>();
    p.rejected = j.at("rejected").get<std::string>();
    p.pep_id = j.at("meta").at("pep_id").get<std::string>();
    p.split = core::parse_split(j.at("meta").at("split").get<std::string>());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("dpo record: ") + e.what());
  }
  return p;
}

std::string render_export(const std::vector<core::PreferencePair>& pairs, ExportFormat format,
                          const Provenance& provenance) {
  std::string out;
  if (format == ExportFormat::dpo_jsonl) {
    if (pairs.empty()) return "# dpo_jsonl v1: 0 records\n";
    for (const auto& p : pairs) {
      auto it = provenance.find(p.id);
      out += to_dpo_record(p, it == provenance.end() ? json(nullptr) : it->second).dump();
      out += '\n';
    }
    return out;
  }
  out = "# chat_transcript v1: " + std::to_string(pairs.size()) + " records\n\n";
  for (const auto& p : pairs) out += transcript_block(p);
  return out;
}

void export_pairs(const std::vector<core::PreferencePair>& pairs, const fs::path& path, ExportFormat format,
                  const Provenance& provenance) {
  write_file_atomic(path, render_export(pairs, format, provenance));
}

std::vector<core::PreferencePair> import_dpo_jsonl(const fs::path& path) {
  std::vector<core::PreferencePair> out;
  auto values = read_jsonl_values(path);
  for (std::size_t i = 0; i < values.size(); ++i) {
    try {
      out.push_back(from_dpo_record(values[i]));
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

json to_json(const TrainingConfig& cfg) {
  return {{"beta", cfg.beta},
          {"epochs", cfg.epochs},
          {"global_batch_size", cfg.global_batch_size},
          {"optimizer", cfg.optimizer},
          {"precision", cfg.precision}};
}

}  // namespace dpf::dataset
