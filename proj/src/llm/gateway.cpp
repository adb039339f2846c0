#include "relshot/llm/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include "relshot/core/errors.hpp"

namespace relshot::llm {
namespace {

constexpr int kDecisionMaxTokens = 5;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::string sentence_bindings_text(const TaggedSentence& s) { return render_tagged(s); }

}  // namespace

const char* to_string(Answer a) { return a == Answer::kYes ? "yes" : "no"; }

const char* to_string(DecisionMethod m) {
  return m == DecisionMethod::kLogit ? "logit" : "text-fallback";
}

Answer decide_from_logprobs(double score_yes, double score_no) {
  return score_yes >= score_no ? Answer::kYes : Answer::kNo;
}

std::optional<std::pair<double, double>> yes_no_scores(
    const std::map<std::string, double>& tokens) {
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  double yes = kNone, no = kNone;
  bool seen = false;
  for (const auto& [token, lp] : tokens) {
    const std::string t = lower(trim(token));
    if (t == "yes") {
      yes = log_add(yes, lp);
      seen = true;
    } else if (t == "no") {
      no = log_add(no, lp);
      seen = true;
    }
  }
  if (!seen) return std::nullopt;
  return std::make_pair(yes, no);
}

std::optional<Answer> parse_yes_no(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && !std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t j = i;
  while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
  const std::string word = lower(text.substr(i, j - i));
  if (word == "yes") return Answer::kYes;
  if (word == "no") return Answer::kNo;
  return std::nullopt;
}

std::vector<std::string> parse_numbered_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line =
        trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    std::size_t d = 0;
    while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
    if (d == 0 || d >= line.size() || (line[d] != ':' && line[d] != '.')) continue;
    const std::string_view body = trim(line.substr(d + 1));
    if (!body.empty()) out.emplace_back(body);
  }
  return out;
}

std::optional<std::vector<int>> parse_id_list(std::string_view text) {
  const auto open = text.find('[');
  if (open == std::string_view::npos) return std::nullopt;
  const auto close = text.find(']', open);
  if (close == std::string_view::npos) return std::nullopt;
  std::vector<int> ids;
  std::string_view inner = text.substr(open + 1, close - open - 1);
  if (trim(inner).empty()) return ids;
  while (true) {
    const auto comma = inner.find(',');
    const std::string_view item = trim(inner.substr(0, comma));
    if (item.empty() || item.size() > 9) return std::nullopt;
    for (char c : item) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    ids.push_back(std::stoi(std::string(item)));
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return ids;
}

std::chrono::milliseconds RetryPolicy::delay_for(int retry) const {
  const double ms = static_cast<double>(base_delay.count()) * std::pow(multiplier, retry);
  return std::chrono::milliseconds(
      static_cast<long long>(std::min(ms, static_cast<double>(max_delay.count()))));
}

std::vector<int> top_similar_pool_ids(const select::CandidatePool& pool,
                                      std::span<const double> similarity, std::size_t n) {
  if (similarity.size() != pool.size()) {
    throw SizeMismatch("similarity scores do not align with the pool");
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return similarity[a] > similarity[b];
  });
  std::vector<int> out;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) {
    out.push_back(pool.entries[order[i]].pool_id);
  }
  return out;
}

/// Holds one of the gateway's in-flight request slots.
class Gateway::Slot {
 public:
  explicit Slot(Gateway& g) : g_(g) {
    std::unique_lock lock(g_.slots_mutex_);
    g_.slots_cv_.wait(lock, [&] { return g_.in_flight_ < g_.config_.max_in_flight; });
    ++g_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(g_.slots_mutex_);
      --g_.in_flight_;
    }
    g_.slots_cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Gateway& g_;
};

Gateway::Gateway(std::shared_ptr<ChatTransport> transport, GatewayConfig config)
    : transport_(std::move(transport)), config_(std::move(config)) {
  if (!transport_) throw InvalidConfig("gateway needs a transport");
  config_.generation.validate();
  if (config_.retry.max_retries < 0) throw InvalidConfig("max_retries must be >= 0");
  if (config_.max_in_flight < 1) throw InvalidConfig("max_in_flight must be >= 1");
  if (!config_.sleep) {
    config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

void Gateway::backoff(int retry) {
  ++retries_;
  const auto d = config_.retry.delay_for(retry);
  if (d.count() > 0) config_.sleep(d);
}

ChatResponse Gateway::exchange(const Prompt& prompt, const std::string& request_id,
                               int attempt, bool want_logprobs, int max_tokens,
                               const DecodingProfile& decoding) {
  ChatRequest req;
  req.model = config_.model;
  req.messages.push_back({"user", prompt.text});
  req.decoding = decoding;
  req.max_tokens = std::min(max_tokens, decoding.max_new_tokens);
  req.logprobs = want_logprobs;
  req.top_logprobs = want_logprobs ? config_.top_logprobs : 0;
  req.template_id = prompt.id;
  req.bindings = &prompt.bindings;
  req.attempt = attempt;
  req.request_id = request_id;
  Slot slot(*this);
  ++requests_;
  return transport_->complete(req);
}

BinaryDecision Gateway::binary_decide(const Prompt& prompt, const std::string& request_id) {
  const int attempts = 1 + config_.retry.max_retries;
  std::string last_error;
  bool last_was_transport = false;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) backoff(attempt - 1);
    ChatResponse resp;
    try {
      resp = exchange(prompt, request_id, attempt, true, kDecisionMaxTokens,
                      DecodingProfile::greedy());
    } catch (const TransportError& e) {
      if (!e.retryable()) throw EndpointError(request_id + ": " + e.what());
      last_error = e.what();
      last_was_transport = true;
      continue;
    }
    BinaryDecision d;
    d.attempts = attempt + 1;
    if (resp.first_token_logprobs) {
      if (auto scores = yes_no_scores(*resp.first_token_logprobs)) {
        d.method = DecisionMethod::kLogit;
        d.score_yes = scores->first;
        d.score_no = scores->second;
        d.answer = decide_from_logprobs(scores->first, scores->second);
        return d;
      }
    }
    if (auto a = parse_yes_no(resp.text)) {
      d.method = DecisionMethod::kTextFallback;
      d.answer = *a;
      ++text_fallbacks_;
      return d;
    }
    last_error = "reply '" + std::string(trim(resp.text)).substr(0, 80) +
                 "' is neither yes nor no";
    last_was_transport = false;
  }
  if (last_was_transport) {
    throw EndpointError(request_id + ": retries exhausted: " + last_error);
  }
  throw UnparseableAnswer(request_id + ": " + last_error);
}

std::string Gateway::complete_text(const Prompt& prompt, const std::string& request_id) {
  const int attempts = 1 + config_.retry.max_retries;
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) backoff(attempt - 1);
    try {
      return exchange(prompt, request_id, attempt, false, config_.generation.max_new_tokens,
                      config_.generation)
          .text;
    } catch (const TransportError& e) {
      if (!e.retryable()) throw EndpointError(request_id + ": " + e.what());
      last_error = e.what();
    }
  }
  throw EndpointError(request_id + ": retries exhausted: " + last_error);
}

std::vector<TaggedSentence> Gateway::generate_examples(const RelationSpec& relation,
                                                       const TaggedSentence& support,
                                                       std::size_t n, GenerationMode mode,
                                                       const std::string& request_id) {
  if (n == 0) throw InvalidConfig("generate_examples needs n >= 1");
  const Prompt prompt = make_prompt(
      mode == GenerationMode::kParaphrase ? TemplateId::kParaphrase : TemplateId::kGenerate,
      {{"RELATION", relation.name},
       {"RELATION_DESCRIPTION", relation.description},
       {"SUPPORT_SENTENCE", sentence_bindings_text(support)},
       {"N", std::to_string(n)}});

  const int attempts = 1 + config_.retry.max_retries;
  std::size_t best = 0;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) backoff(attempt - 1);
    std::string text;
    try {
      text = exchange(prompt, request_id, attempt, false, config_.generation.max_new_tokens,
                      config_.generation)
                 .text;
    } catch (const TransportError& e) {
      if (!e.retryable()) throw EndpointError(request_id + ": " + e.what());
      continue;
    }
    std::vector<TaggedSentence> valid;
    for (const auto& line : parse_numbered_lines(text)) {
      try {
        TaggedSentence s = parse_tagged(line);
        if (mode == GenerationMode::kParaphrase &&
            (s.subject() != support.subject() || s.object() != support.object())) {
          continue;
        }
        valid.push_back(std::move(s));
      } catch (const TagError&) {
      }
    }
    best = std::max(best, valid.size());
    if (valid.size() >= n) {
      valid.resize(n);
      return valid;
    }
  }
  throw GenerationInvalid(request_id + ": " + std::to_string(best) + " of " +
                          std::to_string(n) + " valid examples after " +
                          std::to_string(attempts) + " attempts");
}

SummaryResult Gateway::summarize(const TaggedSentence& example, const std::string& request_id) {
  const Prompt prompt =
      make_prompt(TemplateId::kSummarize, {{"SUPPORT_SENTENCE", sentence_bindings_text(example)}});
  const int attempts = 1 + config_.retry.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) backoff(attempt - 1);
    std::string text;
    try {
      text = exchange(prompt, request_id, attempt, false, config_.generation.max_new_tokens,
                      config_.generation)
                 .text;
    } catch (const TransportError&) {
      continue;
    }
    // Some models wrap the answer; accept the first line that parses.
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto nl = text.find('\n', pos);
      const auto line = trim(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
      pos = nl == std::string::npos ? text.size() : nl + 1;
      if (line.empty()) continue;
      try {
        return {parse_tagged(line), false};
      } catch (const TagError&) {
      }
    }
  }
  ++summarize_fallbacks_;
  return {example, true};
}

PickResult Gateway::pick_diverse(const select::CandidatePool& pool, const RelationSpec& relation,
                                 std::span<const double> similarity_to_gold,
                                 const std::string& request_id) {
  const std::size_t n_pick = pool.size() / 2;
  Bindings b = {{"RELATION", relation.name}, {"RELATION_DESCRIPTION", relation.description}};
  for (const auto& e : pool.entries) {
    b["SUPPORT_SENTENCE_" + std::to_string(e.pool_id)] = sentence_bindings_text(e.sentence);
  }
  const Prompt prompt = make_prompt(TemplateId::kHybridPick, std::move(b));

  const int attempts = 1 + config_.retry.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) backoff(attempt - 1);
    std::string text;
    try {
      text = exchange(prompt, request_id, attempt, false, config_.generation.max_new_tokens,
                      config_.generation)
                 .text;
    } catch (const TransportError&) {
      continue;
    }
    const auto ids = parse_id_list(text);
    if (!ids || ids->size() != n_pick) continue;
    std::set<int> distinct(ids->begin(), ids->end());
    const bool in_range = std::all_of(ids->begin(), ids->end(), [&](int id) {
      return id >= 1 && static_cast<std::size_t>(id) <= pool.size();
    });
    if (distinct.size() == ids->size() && in_range) return {*ids, false, attempt + 1};
  }
  ++pick_fallbacks_;
  return {top_similar_pool_ids(pool, similarity_to_gold, n_pick), true, attempts};
}

BinaryDecision Gateway::ner_check(const TaggedSentence& sentence, std::string_view entity,
                                  const std::string& entity_type,
                                  const std::string& request_id) {
  return binary_decide(make_prompt(TemplateId::kNerCheck, {{"SENTENCE", sentence.text()},
                                                           {"ENTITY", std::string(entity)},
                                                           {"ENTITY_TYPE", entity_type}}),
                       request_id);
}

GatewayStats Gateway::stats() const {
  return {requests_.load(), retries_.load(), summarize_fallbacks_.load(),
          pick_fallbacks_.load(), text_fallbacks_.load()};
}

}  // namespace relshot::llm
