#include "dpf/llmio/types.hpp"

#include <stdexcept>

namespace dpf::llmio {

nlohmann::json to_json(const ChatResponse& r) {
  nlohmann::json j{{"text", r.text},
                   {"model", r.model},
                   {"usage", {{"prompt_tokens", r.usage.prompt_tokens},
                              {"completion_tokens", r.usage.completion_tokens}}},
                   {"attempts", r.attempts}};
  j["token_logprobs"] = r.token_logprobs ? nlohmann::json(*r.token_logprobs) : nlohmann::json(nullptr);
  if (r.selection) {
    const auto& s = *r.selection;
    j["selection"] = {{"requested", s.requested},
                      {"succeeded", s.succeeded},
                      {"selected_index", s.selected_index},
                      {"perplexity", s.perplexity ? nlohmann::json(*s.perplexity) : nlohmann::json(nullptr)},
                      {"logprobs_fallback", s.logprobs_fallback},
                      {"scored_by", s.scored_by}};
  }
  return j;
}

void check(const BackendConfig& cfg) {
  if (cfg.retry.max_attempts < 1) throw std::invalid_argument("retry.max_attempts must be >= 1");
  if (cfg.max_concurrency < 1) throw std::invalid_argument("max_concurrency must be >= 1");
  if (cfg.retry.jitter < 0.0 || cfg.retry.jitter > 1.0) throw std::invalid_argument("retry.jitter must be in [0, 1]");
  if (cfg.rate_limit_rpm < 0.0) throw std::invalid_argument("rate_limit_rpm must be >= 0");
  if (cfg.kind == BackendKind::http && cfg.endpoint.empty()) {
    throw std::invalid_argument("http backend requires an endpoint");
  }
  if (cfg.kind == BackendKind::mock && cfg.mock.embed_dim == 0) {
    throw std::invalid_argument("mock.embed_dim must be > 0");
  }
}

nlohmann::json to_json(const BackendConfig& cfg) {
  return {{"kind", cfg.kind == BackendKind::http ? "http" : "mock"},
          {"endpoint", cfg.endpoint},
          {"model", cfg.model},
          {"api_key_env", cfg.api_key_env},
          {"max_concurrency", cfg.max_concurrency},
          {"retry", {{"max_attempts", cfg.retry.max_attempts},
                     {"base_backoff_ms", cfg.retry.base_backoff.count()},
                     {"jitter", cfg.retry.jitter}}},
          {"rate_limit_rpm", cfg.rate_limit_rpm},
          {"timeout_s", cfg.timeout.count()},
          {"mock", {{"seed", cfg.mock.seed},
                    {"embed_dim", cfg.mock.embed_dim},
                    {"latency_ms", cfg.mock.latency.count()},
                    {"logprobs", cfg.mock.logprobs},
                    {"fail_after_calls", cfg.mock.fail_after_calls}}}};
}

BackendConfig backend_config_from_json(const nlohmann::json& j) {
  BackendConfig c;
  if (!j.is_object()) throw std::invalid_argument("backend config must be an object");
  auto kind = j.value("kind", std::string("mock"));
  if (kind == "http") {
    c.kind = BackendKind::http;
  } else if (kind == "mock") {
    c.kind = BackendKind::mock;
  } else {
    throw std::invalid_argument("unknown backend kind '" + kind + "'");
  }
  if (j.contains("api_key")) {
    throw std::invalid_argument("api keys are read from the environment; use api_key_env");
  }
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
  if (auto it = j.find("retry"); it != j.end()) {
    c.retry.max_attempts = it->value("max_attempts", c.retry.max_attempts);
    c.retry.base_backoff = std::chrono::milliseconds(it->value("base_backoff_ms", c.retry.base_backoff.count()));
    c.retry.jitter = it->value("jitter", c.retry.jitter);
  }
  c.rate_limit_rpm = j.value("rate_limit_rpm", c.rate_limit_rpm);
  c.timeout = std::chrono::seconds(j.value("timeout_s", c.timeout.count()));
  if (auto it = j.find("mock"); it != j.end()) {
    c.mock.seed = it->value("seed", c.mock.seed);
    c.mock.embed_dim = it->value("embed_dim", c.mock.embed_dim);
    c.mock.latency = std::chrono::milliseconds(it->value("latency_ms", c.mock.latency.count()));
    c.mock.logprobs = it->value("logprobs", c.mock.logprobs);
    c.mock.fail_after_calls = it->value("fail_after_calls", c.mock.fail_after_calls);
  }
  check(c);
  return c;
}

}  // namespace dpf::llmio
