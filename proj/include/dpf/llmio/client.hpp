#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include "dpf/llmio/types.hpp"

namespace dpf::llmio {

using Embedding = std::vector<double>;

// One attempt against a provider. Implementations throw TransientError for
// retryable failures and AuthError / MalformedResponse / RequestRejected
// otherwise; retries, pacing and concurrency live in Client.
class Backend {
public:
  virtual ~Backend() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
};

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Shareable across threads. At most cfg.max_concurrency requests are in
// flight at once, request starts are spaced to honour rate_limit_rpm, and
// transient failures are retried with exponential backoff and jitter.
class Client {
public:
  explicit Client(BackendConfig cfg, std::shared_ptr<Backend> backend = nullptr, Sleeper sleeper = {});

  ChatResponse chat(const ChatRequest& req) const;

  // One vector per input text, all of the same dimension.
  std::vector<Embedding> embed(const std::vector<std::string>& texts) const;

  // Issues n completions (candidate i > 0 reseeded to seed + i) and keeps
  // the lowest-perplexity one; ties go to the lowest index. Succeeds if any
  // candidate succeeds. Requires req.want_logprobs.
  ChatResponse best_of_n(const ChatRequest& req, std::size_t n) const;

  const BackendConfig& config() const { return cfg_; }
  const std::shared_ptr<Backend>& backend() const { return backend_; }

private:
  template <class Fn>
  auto with_retries(Fn&& attempt, std::size_t& attempts_out) const -> decltype(attempt());

  void pace() const;
  std::chrono::milliseconds backoff(std::size_t attempt, const TransientError& e) const;

  BackendConfig cfg_;
  std::shared_ptr<Backend> backend_;
  Sleeper sleeper_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
  mutable std::mutex pace_mu_;
  mutable std::chrono::steady_clock::time_point next_start_{};
  mutable std::mutex jitter_mu_;
  mutable std::uint64_t jitter_state_ = 0x9E3779B97F4A7C15ull;
};

}  // namespace dpf::llmio
