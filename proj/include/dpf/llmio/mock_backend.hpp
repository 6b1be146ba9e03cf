#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dpf/llmio/client.hpp"

namespace dpf::llmio {

// Deterministic offline backend. Chat output is a pure function of
// (request tag, prompt text, request seed, mock seed): a per-tag template
// table filled with seeded pseudo-random choices. Embeddings hash the
// normalized text to a seeded unit vector unless pinned.
class MockBackend : public Backend {
public:
  // Consulted before the built-in table; nullopt falls through.
  // call_index counts every complete() call, including failed ones.
  using Responder = std::function<std::optional<ChatResponse>(const ChatRequest&, std::size_t call_index)>;
  // May throw to simulate transport failures.
  using Fault = std::function<void(const ChatRequest&, std::size_t call_index)>;

  struct LedgerEntry {
    std::string tag;
    std::string prompt_hash;
    std::uint64_t seed = 0;
  };

  explicit MockBackend(BackendConfig cfg);

  ChatResponse complete(const ChatRequest& req) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

  void set_responder(Responder r);
  void set_fault(Fault f);
  // Zero-padded to embed_dim; longer vectors are rejected.
  void pin_embedding(const std::string& text, Embedding v);

  // Successful completions only, in completion order.
  std::vector<LedgerEntry> ledger() const;
  std::size_t calls() const { return calls_.load(); }
  std::size_t max_in_flight() const { return max_in_flight_.load(); }

  // Built-in response for a request, without side effects.
  ChatResponse generate(const ChatRequest& req) const;

  static std::string prompt_text(const ChatRequest& req);

private:
  BackendConfig cfg_;
  Responder responder_;
  Fault fault_;
  std::map<std::string, Embedding> pinned_;
  mutable std::mutex mu_;
  std::vector<LedgerEntry> ledger_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> successes_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

}  // namespace dpf::llmio
