#include "relshot/llm/http_transport.hpp"

#include <cmath>
#include <limits>

#include "httplib.h"

namespace relshot::llm {

nlohmann::json build_chat_body(const ChatRequest& req) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : req.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  nlohmann::json body = {{"model", req.model},
                         {"messages", messages},
                         {"max_tokens", req.max_tokens}};
  if (req.decoding.sampling) {
    body["temperature"] = req.decoding.temperature;
    body["top_p"] = req.decoding.top_p;
    if (req.decoding.top_k) body["top_k"] = *req.decoding.top_k;
  } else {
    body["temperature"] = 0.0;
    body["top_p"] = 1.0;
  }
  if (req.logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = req.top_logprobs;
  }
  return body;
}

ChatResponse parse_chat_body(const nlohmann::json& body) {
  const auto choices = body.find("choices");
  if (choices == body.end() || !choices->is_array() || choices->empty()) {
    throw TransportError("chat-completions response without choices", false);
  }
  const auto& choice = (*choices)[0];
  ChatResponse resp;
  if (choice.contains("message") && choice["message"].contains("content") &&
      choice["message"]["content"].is_string()) {
    resp.text = choice["message"]["content"].get<std::string>();
  } else if (choice.contains("text") && choice["text"].is_string()) {
    resp.text = choice["text"].get<std::string>();
  }
  const auto lp = choice.find("logprobs");
  if (lp != choice.end() && lp->is_object() && lp->contains("content") &&
      (*lp)["content"].is_array() && !(*lp)["content"].empty()) {
    const auto& first = (*lp)["content"][0];
    std::map<std::string, double> tokens;
    if (first.contains("top_logprobs") && first["top_logprobs"].is_array()) {
      for (const auto& t : first["top_logprobs"]) {
        if (t.contains("token") && t.contains("logprob") && t["logprob"].is_number()) {
          tokens.emplace(t["token"].get<std::string>(), t["logprob"].get<double>());
        }
      }
    }
    if (first.contains("token") && first.contains("logprob") && first["logprob"].is_number()) {
      tokens.emplace(first["token"].get<std::string>(), first["logprob"].get<double>());
    }
    if (!tokens.empty()) resp.first_token_logprobs = std::move(tokens);
  }
  return resp;
}

HttpTransport::HttpTransport(HttpConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidConfig("endpoint '" + url + "' needs a scheme (http:// or https://)");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.rfind("https://", 0) == 0) {
    throw InvalidConfig("this build has no TLS support; use an http:// endpoint");
  }
#endif
}

ChatResponse HttpTransport::complete(const ChatRequest& req) {
  httplib::Client client(origin_);
  client.set_connection_timeout(config_.connect_timeout);
  client.set_read_timeout(config_.read_timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  const auto res = client.Post(path_, headers, build_chat_body(req).dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + config_.endpoint +
                             " failed: " + httplib::to_string(res.error()),
                         true);
  }
  if (res->status != 200) {
    const bool retryable = res->status == 408 || res->status == 429 || res->status >= 500;
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                             res->body.substr(0, 200),
                         retryable);
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(std::string("response is not JSON: ") + e.what(), true);
  }
  return parse_chat_body(body);
}

}  // namespace relshot::llm
