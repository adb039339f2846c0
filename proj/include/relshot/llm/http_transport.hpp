#pragma once

#include <chrono>
#include <string>

#include "json.hpp"
#include "relshot/llm/transport.hpp"

namespace relshot::llm {

struct HttpConfig {
  /// Full chat-completions URL, e.g. http://localhost:8000/v1/chat/completions.
  std::string endpoint;
  std::string api_key;  // sent as "Authorization: Bearer <key>" when non-empty
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{120};
};

/// Request body in the de-facto chat-completions schema.
nlohmann::json build_chat_body(const ChatRequest& request);

/// Parses a chat-completions response body. Throws TransportError on a
/// body without choices.
ChatResponse parse_chat_body(const nlohmann::json& body);

/// JSON-over-HTTP transport for any OpenAI-compatible server.
class HttpTransport : public ChatTransport {
 public:
  explicit HttpTransport(HttpConfig config);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  HttpConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace relshot::llm
