#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "dpf/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pink elephant preference data pipeline"};
  std::string stage;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> decisions;
  bool resume = false;
  bool verbose = false;

  std::string stages;
  for (const auto& s : dpf::cli::stage_names()) stages += (stages.empty() ? "" : ", ") + s;
  app.add_option("stage", stage, "One of: " + stages)->required();
  app.add_option("--config", config, "Run configuration (JSON)")->required();
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_flag("--resume", resume, "Reuse journaled items from an interrupted run");
  app.add_option("--decisions", decisions, "Review decisions file (JSONL) instead of the interactive prompt");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : dpf::cli::kConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    dpf::cli::Runner runner(dpf::cli::load_config(config, seed));
    dpf::cli::RunOptions opts;
    opts.resume = resume;
    if (decisions) opts.decisions = *decisions;
    return runner.run(stage, opts);
  } catch (const dpf::cli::ConfigInvalid& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return dpf::cli::kConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return dpf::cli::kFailure;
  }
}
