#pragma once

#include <atomic>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relshot/llm/transport.hpp"

namespace relshot::llm {

/// Deterministic scripted transport.
///
/// Each fixture line is a rule:
///   {"template": "binary-relation",
///    "key": "<16 hex digits of bindings_hash>",          (optional)
///    "match": {"RELATION": "per:title"},                  (optional, exact)
///    "contains": {"QUERY_SENTENCE": "Reau"},              (optional, substring)
///    "replies": [{"text": "yes", "logprobs": {"yes": -0.1, "no": -2.3}},
///                {"error": "timeout"}]}
///
/// A request is answered by the first rule whose `key` equals the request's
/// bindings hash; failing that, the first rule (in file order) whose `match`
/// and `contains` conditions all hold; a rule with no conditions is the
/// template's default. The reply used is replies[min(attempt, last)], so
/// retries walk down the list and the answer never depends on call order.
class MockTransport : public ChatTransport {
 public:
  struct Reply {
    std::optional<std::string> text;
    std::optional<std::map<std::string, double>> logprobs;
    std::optional<std::string> error;
    bool retryable = true;
  };
  struct Rule {
    TemplateId template_id;
    std::optional<std::uint64_t> key;
    std::map<std::string, std::string> match;
    std::map<std::string, std::string> contains;
    std::vector<Reply> replies;
  };
  struct CallRecord {
    TemplateId template_id;
    std::string request_id;
    int attempt;
  };

  MockTransport() = default;
  explicit MockTransport(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  static std::vector<Rule> rules_from_file(const std::string& path);
  static Rule rule_from_json(const nlohmann::json& j);

  void add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

  ChatResponse complete(const ChatRequest& request) override;

  std::size_t call_count() const noexcept { return calls_.load(); }
  std::vector<CallRecord> calls() const;

 private:
  const Rule* find_rule(const ChatRequest& request) const;

  std::vector<Rule> rules_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex log_mutex_;
  std::vector<CallRecord> log_;
};

}  // namespace relshot::llm
