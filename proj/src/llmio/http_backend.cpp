#include "dpf/llmio/http_backend.hpp"

#include <cstdlib>

#include "httplib.h"

namespace dpf::llmio {
namespace {

using json = nlohmann::json;

std::string_view role_name(MessageRole r) {
  switch (r) {
    case MessageRole::system:
      return "system";
    case MessageRole::user:
      return "user";
    case MessageRole::assistant:
      return "assistant";
  }
  return "user";
}

std::optional<std::chrono::milliseconds> retry_after(const httplib::Result& res) {
  if (!res || !res->has_header("Retry-After")) return std::nullopt;
  char* end = nullptr;
  auto value = res->get_header_value("Retry-After");
  double secs = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || secs < 0) return std::nullopt;
  return std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  const auto& url = cfg_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must include a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

json HttpBackend::chat_body(const ChatRequest& req, const std::string& model) {
  json messages = json::array();
  for (const auto& m : req.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  json body{{"model", model},
            {"messages", messages},
            {"temperature", req.sampling.temperature},
            {"max_tokens", req.sampling.max_tokens}};
  if (req.sampling.seed) body["seed"] = *req.sampling.seed;
  if (req.want_logprobs) body["logprobs"] = true;
  return body;
}

ChatResponse HttpBackend::parse_chat(const std::string& body) {
  try {
    auto j = json::parse(body);
    const auto& choice = j.at("choices").at(0);
    ChatResponse r;
    r.text = choice.at("message").at("content").get<std::string>();
    r.model = j.value("model", std::string());
    if (auto lp = choice.find("logprobs"); lp != choice.end() && lp->is_object()) {
      std::vector<double> values;
      if (auto content = lp->find("content"); content != lp->end() && content->is_array()) {
        for (const auto& tok : *content) values.push_back(tok.at("logprob").get<double>());
      } else if (auto legacy = lp->find("token_logprobs"); legacy != lp->end() && legacy->is_array()) {
        for (const auto& v : *legacy) values.push_back(v.get<double>());
      }
      if (!values.empty()) r.token_logprobs = std::move(values);
    }
    if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
      r.usage.prompt_tokens = u->value("prompt_tokens", std::size_t{0});
      r.usage.completion_tokens = u->value("completion_tokens", std::size_t{0});
    }
    return r;
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("unparseable chat completion: ") + e.what());
  }
}

std::vector<Embedding> HttpBackend::parse_embeddings(const std::string& body, std::size_t expected) {
  try {
    auto j = json::parse(body);
    std::vector<Embedding> out(expected);
    const auto& data = j.at("data");
    if (data.size() != expected) throw MalformedResponse("embedding count mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t idx = data[i].value("index", i);
      if (idx >= expected) throw MalformedResponse("embedding index out of range");
      out[idx] = data[i].at("embedding").get<Embedding>();
    }
    return out;
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("unparseable embedding response: ") + e.what());
  }
}

json HttpBackend::post(const std::string& path, const json& body) {
  httplib::Client cli(origin_);
  const auto t = static_cast<time_t>(cfg_.timeout.count());
  cli.set_connection_timeout(t, 0);
  cli.set_read_timeout(t, 0);
  cli.set_write_timeout(t, 0);

  httplib::Headers headers;
  if (!cfg_.api_key_env.empty()) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw AuthError("environment variable " + cfg_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto res = cli.Post(prefix_ + path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransientError("request to " + origin_ + prefix_ + path + " failed: " + httplib::to_string(res.error()), 0);
  }
  const int status = res->status;
  if (status == 401 || status == 403) throw AuthError("authentication rejected (HTTP " + std::to_string(status) + ")");
  if (status == 408 || status == 429 || status >= 500) {
    throw TransientError("HTTP " + std::to_string(status), status, retry_after(res));
  }
  if (status >= 400) throw RequestRejected("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("response body is not JSON: ") + e.what());
  }
}

ChatResponse HttpBackend::complete(const ChatRequest& req) {
  auto j = post("/chat/completions", chat_body(req, cfg_.model));
  auto r = parse_chat(j.dump());
  if (r.model.empty()) r.model = cfg_.model;
  return r;
}

std::vector<Embedding> HttpBackend::embed(const std::vector<std::string>& texts) {
  auto j = post("/embeddings", json{{"model", cfg_.model}, {"input", texts}});
  return parse_embeddings(j.dump(), texts.size());
}

}  // namespace dpf::llmio
