#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relshot/core/errors.hpp"
#include "relshot/llm/decoding.hpp"
#include "relshot/llm/templates.hpp"

namespace relshot::llm {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  DecodingProfile decoding;
  int max_tokens = kMaxNewTokensCap;
  bool logprobs = false;
  int top_logprobs = 0;

  // Routing metadata; never sent over the wire.
  TemplateId template_id = TemplateId::kBinaryRelation;
  const Bindings* bindings = nullptr;
  int attempt = 0;
  std::string request_id;
};

struct ChatResponse {
  std::string text;
  /// Log-probabilities of candidate first tokens, when the endpoint reports
  /// them. Keys are raw token strings.
  std::optional<std::map<std::string, double>> first_token_logprobs;
};

/// Failure of a single exchange. Retryable failures (timeouts, 429, 5xx)
/// are retried by the gateway; others fail immediately.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

/// One chat-completion exchange. Implementations must be safe to call from
/// several threads at once.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

}  // namespace relshot::llm
