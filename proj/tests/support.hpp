#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>

#include <unistd.h>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dpf/core/jsonl.hpp"
#include "dpf/llmio/types.hpp"

namespace dpf::testkit {

namespace fs = std::filesystem;

// Stage progress lines drown gtest output; warnings and errors still show.
inline const bool kQuietLogs = (spdlog::set_level(spdlog::level::warn), true);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("dpf_test_" + std::to_string(::getpid()) + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
  fs::path path_;
};

inline llmio::BackendConfig mock_config(std::uint64_t seed, std::string model = "mock") {
  llmio::BackendConfig c;
  c.kind = llmio::BackendKind::mock;
  c.model = std::move(model);
  c.mock.seed = seed;
  c.retry.base_backoff = std::chrono::milliseconds(1);
  return c;
}

// Small mock run configuration; callers adjust fields before writing it.
inline nlohmann::json mock_run_config(const std::string& run_dir, std::size_t dialogues = 100) {
  auto backend = [](int seed, const char* model) {
    return nlohmann::json{{"kind", "mock"}, {"model", model}, {"mock", {{"seed", seed}}},
                          {"retry", {{"base_backoff_ms", 1}}}};
  };
  return {{"run_dir", run_dir},
          {"seed", 7},
          {"backends",
           {{"topic_model", backend(1, "mock-gpt-4")},
            {"generator", backend(2, "mock-gpt-4")},
            {"embedder", backend(3, "mock-embed")},
            {"eval_model", backend(4, "mock-chat")},
            {"judge", backend(5, "mock-gpt-4")}}},
          {"generation", {{"topics", 20}, {"attributes", 10}, {"dialogues", dialogues}}}};
}

inline fs::path write_accept_all_decisions(const fs::path& dir) {
  auto p = dir / "decisions.jsonl";
  write_file_atomic(p,
                    "{\"match\": \"The legal system of extraterrestrial life\", \"decision\": \"reject\"}\n"
                    "{\"match\": \"*\", \"decision\": \"accept\"}\n");
  return p;
}

}  // namespace dpf::testkit
