#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpf/error.hpp"

namespace dpf::llmio {

enum class MessageRole { system, user, assistant };

struct Message {
  MessageRole role = MessageRole::user;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct Sampling {
  double temperature = 1.0;
  std::size_t max_tokens = 1024;
  // Forwarded to servers that accept a seed; the mock derives its output from it.
  std::optional<std::uint64_t> seed;

  bool operator==(const Sampling&) const = default;
};

struct ChatRequest {
  std::vector<Message> messages;
  Sampling sampling;
  bool want_logprobs = false;
  // Stage tag and structured hints. Not sent over the wire; the mock backend
  // keys its response table on them.
  std::string tag;
  std::map<std::string, std::string> hints;
};

struct Usage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;

  bool operator==(const Usage&) const = default;
};

// Filled in by best_of_n.
struct Selection {
  std::size_t requested = 1;
  std::size_t succeeded = 1;
  std::size_t selected_index = 0;
  std::optional<double> perplexity;
  bool logprobs_fallback = false;  // some candidate lacked logprobs; candidate 0 taken
  std::string scored_by;           // model whose logprobs were scored

  bool operator==(const Selection&) const = default;
};

struct ChatResponse {
  std::string text;
  std::optional<std::vector<double>> token_logprobs;
  std::string model;
  Usage usage;
  std::size_t attempts = 1;
  std::optional<Selection> selection;

  bool operator==(const ChatResponse&) const = default;
};

nlohmann::json to_json(const ChatResponse& r);

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds base_backoff{500};
  double jitter = 0.2;  // fraction of the backoff, applied symmetrically
};

enum class BackendKind { http, mock };

struct MockOptions {
  std::uint64_t seed = 0;
  std::size_t embed_dim = 64;
  std::chrono::milliseconds latency{0};
  bool logprobs = true;
  // Fault injection: after this many successful completions every further
  // call fails with HTTP 500. 0 disables.
  std::size_t fail_after_calls = 0;
};

struct BackendConfig {
  BackendKind kind = BackendKind::mock;
  std::string endpoint;     // base URL, e.g. http://127.0.0.1:8000/v1
  std::string model = "mock";
  std::string api_key_env;  // name of the environment variable holding the key
  std::size_t max_concurrency = 4;
  RetryPolicy retry;
  double rate_limit_rpm = 0.0;  // 0 = unlimited
  std::chrono::seconds timeout{120};
  MockOptions mock;
};

// Throws std::invalid_argument describing the first broken rule.
void check(const BackendConfig& cfg);

// Config JSON (api keys never appear; only the variable name does).
nlohmann::json to_json(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const nlohmann::json& j);

class LlmError : public Error {
public:
  using Error::Error;
};

// A single attempt failed in a way worth retrying (429, 408, 5xx, network).
class TransientError : public LlmError {
public:
  TransientError(const std::string& what, int status, std::optional<std::chrono::milliseconds> retry_after = {})
      : LlmError(what), status_(status), retry_after_(retry_after) {}
  int status() const { return status_; }
  std::optional<std::chrono::milliseconds> retry_after() const { return retry_after_; }

private:
  int status_;
  std::optional<std::chrono::milliseconds> retry_after_;
};

class ExhaustedRetries : public LlmError {
public:
  ExhaustedRetries(const std::string& what, std::size_t attempts) : LlmError(what), attempts_(attempts) {}
  std::size_t attempts() const { return attempts_; }

private:
  std::size_t attempts_;
};

class AuthError : public LlmError {
public:
  using LlmError::LlmError;
};

class MalformedResponse : public LlmError {
public:
  using LlmError::LlmError;
};

// Non-retryable 4xx other than 401/403.
class RequestRejected : public LlmError {
public:
  using LlmError::LlmError;
};

}  // namespace dpf::llmio
