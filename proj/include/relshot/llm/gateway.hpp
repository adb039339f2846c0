#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relshot/core/episode.hpp"
#include "relshot/core/tagged_sentence.hpp"
#include "relshot/llm/decoding.hpp"
#include "relshot/llm/templates.hpp"
#include "relshot/llm/transport.hpp"
#include "relshot/select/hybrid_pool.hpp"

namespace relshot::llm {

enum class Answer { kYes, kNo };
enum class DecisionMethod { kLogit, kTextFallback };

const char* to_string(Answer a);
const char* to_string(DecisionMethod m);

struct BinaryDecision {
  Answer answer = Answer::kNo;
  DecisionMethod method = DecisionMethod::kTextFallback;
  std::optional<double> score_yes;  // log-probabilities, logit method only
  std::optional<double> score_no;
  int attempts = 1;

  bool yes() const noexcept { return answer == Answer::kYes; }
};

/// Decision rule on first-token log-probabilities: yes iff score_yes >= score_no.
Answer decide_from_logprobs(double score_yes, double score_no);

/// Collapses first-token candidates onto "yes"/"no" (trimmed, case-folded,
/// probabilities of variants summed). Returns nullopt when neither occurs.
std::optional<std::pair<double, double>> yes_no_scores(
    const std::map<std::string, double>& first_token_logprobs);

/// First alphabetic word of `text`, case-insensitive. nullopt if it is
/// neither yes nor no.
std::optional<Answer> parse_yes_no(std::string_view text);

/// Lines of the form "01: ...", "1: ..." or "1. ..." in reply order.
std::vector<std::string> parse_numbered_lines(std::string_view text);

/// The first bracketed integer list, e.g. "[1, 4, 6, 7]". nullopt when
/// absent or containing a non-integer.
std::optional<std::vector<int>> parse_id_list(std::string_view text);

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{5000};

  std::chrono::milliseconds delay_for(int retry) const;
};

struct GatewayConfig {
  std::string model = "mock";
  DecodingProfile generation = DecodingProfile::qwen();
  RetryPolicy retry;
  int max_in_flight = 8;
  int top_logprobs = 20;
  /// Replaced in tests to skip real sleeping.
  std::function<void(std::chrono::milliseconds)> sleep;
};

enum class GenerationMode { kParaphrase, kNew };

struct SummaryResult {
  TaggedSentence sentence;
  bool fell_back = false;
};

struct PickResult {
  std::vector<int> pool_ids;
  bool fell_back = false;
  int attempts = 1;
};

struct GatewayStats {
  std::size_t requests = 0;
  std::size_t retries = 0;
  std::size_t summarize_fallbacks = 0;
  std::size_t pick_fallbacks = 0;
  std::size_t text_fallback_decisions = 0;
};

/// The only component that talks to a chat-completion endpoint.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatTransport> transport, GatewayConfig config);

  const GatewayConfig& config() const noexcept { return config_; }

  /// Yes/no decision: first-token log-probabilities when the endpoint
  /// reports them, otherwise the first word of the reply. Throws
  /// EndpointError or UnparseableAnswer once the retry budget is spent.
  BinaryDecision binary_decide(const Prompt& prompt, const std::string& request_id);

  /// Plain completion with retries (transport failures only).
  std::string complete_text(const Prompt& prompt, const std::string& request_id);

  /// Throws GenerationInvalid if no attempt yields n valid lines.
  std::vector<TaggedSentence> generate_examples(const RelationSpec& relation,
                                                const TaggedSentence& support, std::size_t n,
                                                GenerationMode mode,
                                                const std::string& request_id);

  /// Never throws on bad output: after the budget the input comes back unchanged.
  SummaryResult summarize(const TaggedSentence& example, const std::string& request_id);

  /// Asks the model for floor(|pool|/2) pool ids. On repeated invalid replies
  /// falls back to the entries with the highest `similarity_to_gold`
  /// (aligned with pool.entries).
  PickResult pick_diverse(const select::CandidatePool& pool, const RelationSpec& relation,
                          std::span<const double> similarity_to_gold,
                          const std::string& request_id);

  /// Does `entity` in `sentence` denote (or co-refer to) an `entity_type`?
  BinaryDecision ner_check(const TaggedSentence& sentence, std::string_view entity,
                           const std::string& entity_type, const std::string& request_id);

  GatewayStats stats() const;

 private:
  class Slot;
  ChatResponse exchange(const Prompt& prompt, const std::string& request_id, int attempt,
                        bool want_logprobs, int max_tokens, const DecodingProfile& decoding);
  void backoff(int retry);

  std::shared_ptr<ChatTransport> transport_;
  GatewayConfig config_;

  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;

  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> summarize_fallbacks_{0};
  std::atomic<std::size_t> pick_fallbacks_{0};
  std::atomic<std::size_t> text_fallbacks_{0};
};

/// Top-n pool ids by similarity (descending; lower pool id on ties).
std::vector<int> top_similar_pool_ids(const select::CandidatePool& pool,
                                      std::span<const double> similarity, std::size_t n);

}  // namespace relshot::llm
