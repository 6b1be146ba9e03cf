#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpf/error.hpp"

namespace dpf {

namespace fs = std::filesystem;

class IoError : public Error {
public:
  using Error::Error;
};

std::string read_file(const fs::path& path);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const fs::path& path, std::string_view content);

// Parsed JSON objects, one per non-blank line; lines starting with '#' are
// comments. Errors carry the 1-based line number.
std::vector<nlohmann::json> read_jsonl_values(const fs::path& path);

template <class T>
std::vector<T> read_jsonl(const fs::path& path) {
  std::vector<T> out;
  auto values = read_jsonl_values(path);
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    try {
      out.push_back(values[i].template get<T>());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

template <class T>
std::string to_jsonl(const std::vector<T>& records) {
  std::string out;
  for (const auto& r : records) {
    out += nlohmann::json(r).dump();
    out += '\n';
  }
  return out;
}

template <class T>
void write_jsonl(const fs::path& path, const std::vector<T>& records) {
  write_file_atomic(path, to_jsonl(records));
}

// Append-only line log, flushed after every record so a crash loses at most
// the line being written.
class JsonlAppender {
public:
  explicit JsonlAppender(const fs::path& path);
  void append(const nlohmann::json& record);

private:
  std::ofstream out_;
  fs::path path_;
};

}  // namespace dpf
