#pragma once

#include <string>

#include "dpf/llmio/client.hpp"

namespace dpf::llmio {

// Speaks the role-tagged chat-completion convention over HTTP+JSON:
//   POST {endpoint}/chat/completions  {model, messages, temperature, max_tokens, seed?, logprobs?}
//   POST {endpoint}/embeddings        {model, input: [...]}
// The API key is read from the named environment variable at request time
// and sent as a bearer token; it is never stored on the object.
class HttpBackend : public Backend {
public:
  explicit HttpBackend(BackendConfig cfg);

  ChatResponse complete(const ChatRequest& req) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

  // Exposed for tests.
  static nlohmann::json chat_body(const ChatRequest& req, const std::string& model);
  static ChatResponse parse_chat(const std::string& body);
  static std::vector<Embedding> parse_embeddings(const std::string& body, std::size_t expected);

private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  BackendConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string prefix_;  // path prefix, without trailing slash
};

}  // namespace dpf::llmio
