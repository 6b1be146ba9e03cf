#include "dpf/cli/config.hpp"

#include <set>

#include "dpf/core/hash.hpp"

namespace dpf::cli {
namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigInvalid(where + ": must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw ConfigInvalid(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigInvalid(where + "." + key + ": wrong type");
  }
}

std::string read_template(const json& j, const char* key, const fs::path& base, const std::string& where) {
  auto p = j.at(key).get<std::string>();
  fs::path path = fs::path(p).is_absolute() ? fs::path(p) : base / p;
  try {
    return read_file(path);
  } catch (const IoError& e) {
    throw ConfigInvalid(where + "." + key + ": " + e.what());
  }
}

genpipe::StagePrompt* prompt_slot(genpipe::PromptSet& ps, const std::string& name) {
  if (name == "topics") return &ps.topics;
  if (name == "peps") return &ps.peps;
  if (name == "attributes") return &ps.attributes;
  if (name == "dialogue") return &ps.dialogue;
  if (name == "dialogue_theme") return &ps.dialogue_theme;
  if (name == "critique") return &ps.critique;
  if (name == "revision") return &ps.revision;
  return nullptr;
}

}  // namespace

RunConfig parse_config(const json& src, const fs::path& base_dir, std::optional<std::uint64_t> seed_override) {
  RunConfig c;
  c.source = src;
  if (seed_override) c.source["seed"] = *seed_override;
  const json& j = c.source;
  only_keys(j, {"run_dir", "seed", "backends", "generation", "templates", "filter", "split", "export", "eval"},
            "config");

  if (!j.contains("run_dir")) throw ConfigInvalid("config: run_dir is required");
  std::string run_dir;
  read(j, "run_dir", run_dir, "config");
  c.run_dir = fs::path(run_dir).is_absolute() ? fs::path(run_dir) : base_dir / run_dir;
  read(j, "seed", c.seed, "config");

  if (!j.contains("backends")) throw ConfigInvalid("config: backends is required");
  const auto& b = j.at("backends");
  only_keys(b, {kBackendRoles.begin(), kBackendRoles.end()}, "backends");
  for (const auto& role : kBackendRoles) {
    if (!b.contains(role)) throw ConfigInvalid("backends." + role + ": missing");
    try {
      c.backends[role] = llmio::backend_config_from_json(b.at(role));
    } catch (const std::exception& e) {
      throw ConfigInvalid("backends." + role + ": " + e.what());
    }
  }

  c.gen.seed = c.seed;
  if (auto it = j.find("generation"); it != j.end()) {
    const std::string w = "generation";
    only_keys(*it, {"topics", "attributes", "dialogues", "manual_topics", "best_of_n", "dialogue_temperature",
                    "edit_temperature", "list_temperature", "max_tokens", "emit_swapped", "min_turns", "max_turns"},
              w);
    read(*it, "topics", c.n_topics, w);
    read(*it, "attributes", c.n_attributes, w);
    read(*it, "dialogues", c.n_dialogues, w);
    read(*it, "manual_topics", c.manual_topics, w);
    read(*it, "best_of_n", c.gen.best_of_n, w);
    read(*it, "dialogue_temperature", c.gen.dialogue_temperature, w);
    read(*it, "edit_temperature", c.gen.edit_temperature, w);
    read(*it, "list_temperature", c.gen.list_temperature, w);
    read(*it, "max_tokens", c.gen.max_tokens, w);
    read(*it, "emit_swapped", c.gen.emit_swapped, w);
    read(*it, "min_turns", c.gen.min_turns, w);
    read(*it, "max_turns", c.gen.max_turns, w);
  }
  if (c.n_topics == 0 || c.n_attributes == 0) throw ConfigInvalid("generation: counts must be >= 1");
  if (c.gen.best_of_n == 0) throw ConfigInvalid("generation.best_of_n: must be >= 1");
  if (c.gen.min_turns < 2 || c.gen.min_turns > c.gen.max_turns) {
    throw ConfigInvalid("generation: need 2 <= min_turns <= max_turns");
  }

  if (auto it = j.find("templates"); it != j.end()) {
    if (!it->is_object()) throw ConfigInvalid("templates: must be an object");
    for (const auto& [name, v] : it->items()) {
      if (name == "avoidance") {
        c.avoidance_template = read_template(*it, "avoidance", base_dir, "templates");
        continue;
      }
      auto* slot = prompt_slot(c.gen.prompts, name);
      if (!slot) throw ConfigInvalid("templates: unknown key '" + name + "'");
      slot->text = read_template(*it, name.c_str(), base_dir, "templates");
    }
  }
  try {
    c.gen.prompts.check_all();
  } catch (const genpipe::TemplateError& e) {
    throw ConfigInvalid(std::string("templates: ") + e.what());
  }

  if (auto it = j.find("filter"); it != j.end()) {
    const std::string w = "filter";
    only_keys(*it, {"cosine_threshold", "levenshtein_max_norm", "hamming_max_norm", "window_slack", "use_embeddings",
                    "parallel_kernels"},
              w);
    read(*it, "cosine_threshold", c.filter.cosine_threshold, w);
    read(*it, "levenshtein_max_norm", c.filter.levenshtein_max_norm, w);
    read(*it, "hamming_max_norm", c.filter.hamming_max_norm, w);
    read(*it, "window_slack", c.filter.window_slack, w);
    read(*it, "use_embeddings", c.use_embeddings, w);
    read(*it, "parallel_kernels", c.filter.parallel_kernels, w);
  }
  try {
    cleanse::check(c.filter);
  } catch (const std::invalid_argument& e) {
    throw ConfigInvalid(std::string("filter: ") + e.what());
  }

  c.split.seed = c.seed;
  if (auto it = j.find("split"); it != j.end()) {
    only_keys(*it, {"train", "val", "test"}, "split");
    read(*it, "train", c.split.train, "split");
    read(*it, "val", c.split.val, "split");
    read(*it, "test", c.split.test, "split");
  }
  try {
    dataset::check(c.split);
  } catch (const std::invalid_argument& e) {
    throw ConfigInvalid(std::string("split: ") + e.what());
  }

  if (auto it = j.find("export"); it != j.end()) {
    only_keys(*it, {"formats", "training"}, "export");
    if (it->contains("formats")) {
      c.export_formats.clear();
      try {
        for (const auto& f : it->at("formats")) c.export_formats.push_back(dataset::parse_export_format(f.get<std::string>()));
      } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("export.formats: ") + e.what());
      }
    }
    if (auto t = it->find("training"); t != it->end()) {
      only_keys(*t, {"beta", "epochs", "global_batch_size", "optimizer", "precision"}, "export.training");
      read(*t, "beta", c.training.beta, "export.training");
      read(*t, "epochs", c.training.epochs, "export.training");
      read(*t, "global_batch_size", c.training.global_batch_size, "export.training");
      read(*t, "optimizer", c.training.optimizer, "export.training");
      read(*t, "precision", c.training.precision, "export.training");
    }
  }

  c.eval.avoidance_template = c.avoidance_template;
  c.eval.seed = c.seed;
  if (auto it = j.find("eval"); it != j.end()) {
    only_keys(*it, {"base_system_prompt", "temperature", "max_tokens"}, "eval");
    read(*it, "base_system_prompt", c.eval.base_system_prompt, "eval");
    read(*it, "temperature", c.eval.temperature, "eval");
    read(*it, "max_tokens", c.eval.max_tokens, "eval");
  }
  return c;
}

RunConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const IoError& e) {
    throw ConfigInvalid(e.what());
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(path.string() + ": " + e.what());
  }
  return parse_config(j, fs::absolute(path).parent_path(), seed_override);
}

std::string stage_config_hash(const RunConfig& cfg, const std::string& stage) {
  const json& s = cfg.source;
  auto section = [&](const char* k) { return s.contains(k) ? s.at(k) : json(nullptr); };
  auto backend = [&](const std::string& role) { return llmio::to_json(cfg.backends.at(role)); };
  json h{{"stage", stage}, {"seed", cfg.seed}};

  if (stage == "topics") {
    h["backend"] = backend("topic_model");
    h["gen"] = section("generation");
    h["prompt"] = cfg.gen.prompts.topics.text;
  } else if (stage == "peps") {
    h["backend"] = backend("topic_model");
    h["gen"] = section("generation");
    h["prompt"] = cfg.gen.prompts.peps.text;
  } else if (stage == "attributes") {
    h["backend"] = backend("topic_model");
    h["gen"] = section("generation");
    h["prompt"] = cfg.gen.prompts.attributes.text;
  } else if (stage == "dialogues") {
    h["backend"] = backend("generator");
    h["gen"] = section("generation");
    h["prompts"] = {cfg.gen.prompts.dialogue.text, cfg.gen.prompts.dialogue_theme.text};
  } else if (stage == "critique-revise") {
    h["backend"] = backend("generator");
    h["embedder"] = backend("embedder");
    h["gen"] = section("generation");
    h["filter"] = section("filter");
    h["prompts"] = {cfg.gen.prompts.critique.text, cfg.gen.prompts.revision.text};
  } else if (stage == "filter") {
    h["embedder"] = backend("embedder");
    h["filter"] = section("filter");
  } else if (stage == "split") {
    h["split"] = section("split");
    h["avoidance"] = cfg.avoidance_template;
  } else if (stage == "export") {
    h["export"] = section("export");
  } else if (stage == "evaluate") {
    h["eval_model"] = backend("eval_model");
    h["judge"] = backend("judge");
    h["eval"] = section("eval");
    h["avoidance"] = cfg.avoidance_template;
  }
  // review stages and report read no config beyond the stage name and seed
  return sha256_hex(h.dump());
}

}  // namespace dpf::cli
