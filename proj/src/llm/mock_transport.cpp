#include "relshot/llm/mock_transport.hpp"

#include <fstream>

namespace relshot::llm {

MockTransport::Rule MockTransport::rule_from_json(const nlohmann::json& j) {
  Rule rule;
  rule.template_id = template_from_string(j.at("template").get<std::string>());
  if (j.contains("key")) {
    rule.key = std::stoull(j["key"].get<std::string>(), nullptr, 16);
  }
  if (j.contains("match")) rule.match = j["match"].get<std::map<std::string, std::string>>();
  if (j.contains("contains")) {
    rule.contains = j["contains"].get<std::map<std::string, std::string>>();
  }
  for (const auto& r : j.at("replies")) {
    Reply reply;
    if (r.contains("text")) reply.text = r["text"].get<std::string>();
    if (r.contains("logprobs")) reply.logprobs = r["logprobs"].get<std::map<std::string, double>>();
    if (r.contains("error")) reply.error = r["error"].get<std::string>();
    reply.retryable = r.value("retryable", true);
    rule.replies.push_back(std::move(reply));
  }
  if (rule.replies.empty()) throw Error("mock rule without replies");
  return rule;
}

std::vector<MockTransport::Rule> MockTransport::rules_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mock fixture '" + path + "'");
  std::vector<Rule> rules;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rules.push_back(rule_from_json(nlohmann::json::parse(raw)));
    } catch (const std::exception& e) {
      throw SchemaError(line, std::string("mock fixture: ") + e.what());
    }
  }
  return rules;
}

const MockTransport::Rule* MockTransport::find_rule(const ChatRequest& req) const {
  const Bindings empty;
  const Bindings& b = req.bindings ? *req.bindings : empty;
  const std::uint64_t key = bindings_hash(b);
  for (const auto& r : rules_) {
    if (r.template_id == req.template_id && r.key && *r.key == key) return &r;
  }
  for (const auto& r : rules_) {
    if (r.template_id != req.template_id || r.key) continue;
    bool ok = true;
    for (const auto& [name, value] : r.match) {
      const auto it = b.find(name);
      ok = ok && it != b.end() && it->second == value;
    }
    for (const auto& [name, needle] : r.contains) {
      const auto it = b.find(name);
      ok = ok && it != b.end() && it->second.find(needle) != std::string::npos;
    }
    if (ok) return &r;
  }
  return nullptr;
}

ChatResponse MockTransport::complete(const ChatRequest& req) {
  ++calls_;
  {
    std::lock_guard lock(log_mutex_);
    log_.push_back({req.template_id, req.request_id, req.attempt});
  }
  const Rule* rule = find_rule(req);
  if (!rule) {
    throw TransportError("mock: no scripted reply for " + to_string(req.template_id) +
                             " (bindings " + hex64(bindings_hash(req.bindings ? *req.bindings
                                                                              : Bindings{})) +
                             ")",
                         false);
  }
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(req.attempt),
                                         rule->replies.size() - 1);
  const Reply& reply = rule->replies[idx];
  if (reply.error) throw TransportError("mock: " + *reply.error, reply.retryable);
  ChatResponse resp;
  resp.text = reply.text.value_or("");
  if (req.logprobs) resp.first_token_logprobs = reply.logprobs;
  return resp;
}

std::vector<MockTransport::CallRecord> MockTransport::calls() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

}  // namespace relshot::llm
