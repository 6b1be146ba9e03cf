#include "dpf/llmio/client.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <spdlog/spdlog.h>

#include "dpf/llmio/http_backend.hpp"
#include "dpf/llmio/mock_backend.hpp"
#include "dpf/math/stats.hpp"

namespace dpf::llmio {
namespace {

constexpr std::chrono::milliseconds kMaxBackoff{60'000};

struct SlotGuard {
  explicit SlotGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;
  std::counting_semaphore<>& sem;
};

}  // namespace

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg) {
  check(cfg);
  if (cfg.kind == BackendKind::mock) return std::make_shared<MockBackend>(cfg);
  return std::make_shared<HttpBackend>(cfg);
}

Client::Client(BackendConfig cfg, std::shared_ptr<Backend> backend, Sleeper sleeper)
    : cfg_(std::move(cfg)),
      backend_(backend ? std::move(backend) : make_backend(cfg_)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      slots_(std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(cfg_.max_concurrency))) {
  check(cfg_);
}

void Client::pace() const {
  if (cfg_.rate_limit_rpm <= 0.0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(60.0 / cfg_.rate_limit_rpm));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(pace_mu_);
    auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_start_);
    next_start_ = slot + interval;
  }
  auto wait = slot - std::chrono::steady_clock::now();
  if (wait > std::chrono::steady_clock::duration::zero()) {
    sleeper_(std::chrono::ceil<std::chrono::milliseconds>(wait));
  }
}

std::chrono::milliseconds Client::backoff(std::size_t attempt, const TransientError& e) const {
  if (auto ra = e.retry_after()) return std::min(*ra, kMaxBackoff);
  double base = static_cast<double>(cfg_.retry.base_backoff.count()) * std::pow(2.0, static_cast<double>(attempt - 1));
  double u = 0.0;
  {
    // xorshift64; jitter only affects timing, so a small private generator is enough.
    std::lock_guard lock(jitter_mu_);
    jitter_state_ ^= jitter_state_ << 13;
    jitter_state_ ^= jitter_state_ >> 7;
    jitter_state_ ^= jitter_state_ << 17;
    u = static_cast<double>(jitter_state_ >> 11) * 0x1.0p-53;
  }
  double scaled = base * (1.0 + cfg_.retry.jitter * (2.0 * u - 1.0));
  auto ms = std::chrono::milliseconds(static_cast<long long>(std::max(0.0, scaled)));
  return std::min(ms, kMaxBackoff);
}

template <class Fn>
auto Client::with_retries(Fn&& attempt, std::size_t& attempts_out) const -> decltype(attempt()) {
  std::string last;
  for (std::size_t i = 1; i <= cfg_.retry.max_attempts; ++i) {
    attempts_out = i;
    try {
      pace();
      SlotGuard guard(*slots_);
      return attempt();
    } catch (const TransientError& e) {
      last = e.what();
      spdlog::debug("attempt {}/{} failed: {}", i, cfg_.retry.max_attempts, last);
      if (i < cfg_.retry.max_attempts) sleeper_(backoff(i, e));
    }
  }
  throw ExhaustedRetries("gave up after " + std::to_string(cfg_.retry.max_attempts) +
                             " attempts: " + last,
                         cfg_.retry.max_attempts);
}

ChatResponse Client::chat(const ChatRequest& req) const {
  if (req.messages.empty()) throw std::invalid_argument("chat request has no messages");
  std::size_t attempts = 0;
  ChatResponse resp = with_retries([&] { return backend_->complete(req); }, attempts);
  resp.attempts = attempts;
  if (resp.token_logprobs) {
    for (double lp : *resp.token_logprobs) {
      if (!(lp <= 0.0)) throw MalformedResponse("token log-probability above zero");
    }
  }
  return resp;
}

std::vector<Embedding> Client::embed(const std::vector<std::string>& texts) const {
  if (texts.empty()) throw std::invalid_argument("embed called with no texts");
  std::size_t attempts = 0;
  auto out = with_retries([&] { return backend_->embed(texts); }, attempts);
  if (out.size() != texts.size()) throw MalformedResponse("embedding count does not match input count");
  const std::size_t dim = out.front().size();
  if (dim == 0) throw MalformedResponse("empty embedding vector");
  for (const auto& v : out) {
    if (v.size() != dim) throw MalformedResponse("embedding dimensions differ within one response");
  }
  return out;
}

ChatResponse Client::best_of_n(const ChatRequest& req, std::size_t n) const {
  if (n == 0) throw std::invalid_argument("best_of_n requires n >= 1");
  if (!req.want_logprobs) throw std::invalid_argument("best_of_n requires want_logprobs");

  std::vector<std::optional<ChatResponse>> candidates(n);
  std::exception_ptr last_error;
  for (std::size_t i = 0; i < n; ++i) {
    ChatRequest cand = req;
    if (i > 0) cand.sampling.seed = req.sampling.seed.value_or(0) + i;
    try {
      candidates[i] = chat(cand);
    } catch (const LlmError& e) {
      spdlog::warn("best_of_n: candidate {}/{} failed: {}", i, n, e.what());
      last_error = std::current_exception();
    }
  }

  std::size_t succeeded = 0;
  bool all_scored = true;
  for (const auto& c : candidates) {
    if (!c) continue;
    ++succeeded;
    if (!c->token_logprobs || c->token_logprobs->empty()) all_scored = false;
  }
  if (succeeded == 0) std::rethrow_exception(last_error);

  Selection sel;
  sel.requested = n;
  sel.succeeded = succeeded;
  sel.scored_by = cfg_.model;
  std::size_t chosen = n;
  if (!all_scored) {
    sel.logprobs_fallback = true;
    for (std::size_t i = 0; i < n && chosen == n; ++i) {
      if (candidates[i]) chosen = i;
    }
  } else {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!candidates[i]) continue;
      double ppl = math::perplexity(*candidates[i]->token_logprobs);
      if (chosen == n || ppl < best) {
        chosen = i;
        best = ppl;
      }
    }
    sel.perplexity = best;
  }
  sel.selected_index = chosen;
  ChatResponse out = std::move(*candidates[chosen]);
  out.selection = sel;
  return out;
}

}  // namespace dpf::llmio
