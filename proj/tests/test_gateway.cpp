#include <algorithm>
#include <functional>
#include <numeric>

#include "doctest.h"
#include "relshot/core/errors.hpp"
#include "relshot/llm/gateway.hpp"
#include "relshot/llm/mock_transport.hpp"

using namespace relshot;
using namespace relshot::llm;

namespace {

/// Transport driven by a callback, for fault injection.
class FnTransport : public ChatTransport {
 public:
  using Fn = std::function<ChatResponse(const ChatRequest&)>;
  explicit FnTransport(Fn fn) : fn_(std::move(fn)) {}
  ChatResponse complete(const ChatRequest& r) override {
    ++calls;
    last = r;
    return fn_(r);
  }
  int calls = 0;
  ChatRequest last;

 private:
  Fn fn_;
};

struct Harness {
  std::shared_ptr<FnTransport> transport;
  std::vector<std::chrono::milliseconds> sleeps;
  std::unique_ptr<Gateway> gateway;

  explicit Harness(FnTransport::Fn fn) : transport(std::make_shared<FnTransport>(std::move(fn))) {
    GatewayConfig cfg;
    cfg.sleep = [this](std::chrono::milliseconds d) { sleeps.push_back(d); };
    gateway = std::make_unique<Gateway>(transport, cfg);
  }
};

ChatResponse text(std::string t) { return {std::move(t), std::nullopt}; }

ChatResponse logits(std::map<std::string, double> lp, std::string t = "") {
  return {std::move(t), std::move(lp)};
}

Prompt binary_prompt() {
  return make_prompt(TemplateId::kBinaryRelation,
                     {{"RELATION", "per:title"},
                      {"RELATION_DESCRIPTION", "the title of a person"},
                      {"SUPPORT_SENTENCE_1", "<subject>Ann</subject> is <object>mayor</object> ."},
                      {"QUERY_SENTENCE", "<subject>Bo</subject> is <object>chief</object> ."}});
}

const RelationSpec kRel{"per:title", "the title of a person", "PERSON", "TITLE"};

select::CandidatePool pool_of(std::size_t n) {
  std::vector<TaggedSentence> gen, ret;
  for (std::size_t i = 0; i < n / 2; ++i) {
    gen.push_back(parse_tagged("<subject>G" + std::to_string(i) + "</subject> x <object>O</object>"));
    ret.push_back(parse_tagged("<subject>R" + std::to_string(i) + "</subject> y <object>O</object>"));
  }
  return select::assemble_hybrid_pool(gen, ret, 7);
}

}  // namespace

TEST_SUITE("gateway") {

TEST_CASE("reply parsers") {
  CHECK(parse_yes_no("Yes") == Answer::kYes);
  CHECK(parse_yes_no("  \"no.\"") == Answer::kNo);
  CHECK(parse_yes_no("No, the relation does not hold.") == Answer::kNo);
  CHECK_FALSE(parse_yes_no("Maybe"));
  CHECK_FALSE(parse_yes_no("yesterday"));
  CHECK_FALSE(parse_yes_no(""));

  const auto lines = parse_numbered_lines("Sure:\n01: a\n2. b\n\n3:\nx 4: c\n10: d\n");
  CHECK(lines == std::vector<std::string>{"a", "b", "d"});

  CHECK(parse_id_list("[1, 4, 6, 7]") == std::vector<int>{1, 4, 6, 7});
  CHECK(parse_id_list("Picks: [2,3]!") == std::vector<int>{2, 3});
  CHECK(parse_id_list("[]") == std::vector<int>{});
  CHECK_FALSE(parse_id_list("1, 2"));
  CHECK_FALSE(parse_id_list("[1, two]"));
  CHECK_FALSE(parse_id_list("[-1, 2]"));
  CHECK_FALSE(parse_id_list("[1, , 2]"));
}

TEST_CASE("logit scores fold token variants") {
  const auto s = yes_no_scores({{"Yes", std::log(0.2)}, {" yes", std::log(0.1)},
                                {"No", std::log(0.3)}, {"Maybe", std::log(0.4)}});
  REQUIRE(s);
  CHECK(s->first == doctest::Approx(std::log(0.3)));
  CHECK(s->second == doctest::Approx(std::log(0.3)));
  CHECK_FALSE(yes_no_scores({{"Maybe", -0.1}}));
  CHECK(decide_from_logprobs(-1.0, -1.0) == Answer::kYes);
  CHECK(decide_from_logprobs(-1.0, -0.999) == Answer::kNo);
}

TEST_CASE("binary decisions prefer logits and fall back to text") {
  SUBCASE("logit, yes on a tie") {
    Harness h([](const ChatRequest&) { return logits({{"yes", -0.7}, {"no", -0.7}}, "no"); });
    const auto d = h.gateway->binary_decide(binary_prompt(), "r");
    CHECK(d.yes());
    CHECK(d.method == DecisionMethod::kLogit);
    CHECK(*d.score_yes == -0.7);
    CHECK(h.transport->last.logprobs);
    CHECK(h.transport->last.max_tokens <= 5);
    CHECK(h.transport->last.decoding.temperature == 0.0);
  }
  SUBCASE("text fallback without logprobs") {
    Harness h([](const ChatRequest&) { return text("No, the relation does not hold."); });
    const auto d = h.gateway->binary_decide(binary_prompt(), "r");
    CHECK_FALSE(d.yes());
    CHECK(d.method == DecisionMethod::kTextFallback);
    CHECK_FALSE(d.score_yes);
    CHECK(h.gateway->stats().text_fallback_decisions == 1);
  }
  SUBCASE("text fallback when logprobs lack yes and no") {
    Harness h([](const ChatRequest&) { return logits({{"The", -0.1}}, "Yes"); });
    CHECK(h.gateway->binary_decide(binary_prompt(), "r").method == DecisionMethod::kTextFallback);
  }
  SUBCASE("unparseable replies are retried then reported") {
    Harness h([](const ChatRequest& r) {
      return text(r.attempt < 2 ? "I cannot say" : "yes");
    });
    const auto d = h.gateway->binary_decide(binary_prompt(), "r");
    CHECK(d.yes());
    CHECK(d.attempts == 3);
    Harness never([](const ChatRequest&) { return text("perhaps"); });
    CHECK_THROWS_AS(never.gateway->binary_decide(binary_prompt(), "r"), UnparseableAnswer);
    CHECK(never.transport->calls == 4);
  }
}

TEST_CASE("transport failures: retry with backoff, then fail") {
  SUBCASE("retryable errors recover") {
    Harness h([](const ChatRequest& r) -> ChatResponse {
      if (r.attempt < 2) throw TransportError("timeout", true);
      return text("yes");
    });
    CHECK(h.gateway->binary_decide(binary_prompt(), "r").yes());
    CHECK(h.gateway->stats().retries == 2);
    CHECK(h.gateway->stats().requests == 3);
    CHECK(h.sleeps == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(200),
                                                             std::chrono::milliseconds(400)});
  }
  SUBCASE("retry budget exhausted") {
    Harness h([](const ChatRequest&) -> ChatResponse { throw TransportError("503", true); });
    CHECK_THROWS_AS(h.gateway->binary_decide(binary_prompt(), "r"), EndpointError);
    CHECK(h.transport->calls == 4);
    CHECK_THROWS_AS(h.gateway->complete_text(binary_prompt(), "r"), EndpointError);
    CHECK(h.transport->calls == 8);
  }
  SUBCASE("non-retryable errors fail at once") {
    Harness h([](const ChatRequest&) -> ChatResponse { throw TransportError("401", false); });
    CHECK_THROWS_AS(h.gateway->binary_decide(binary_prompt(), "r"), EndpointError);
    CHECK(h.transport->calls == 1);
    CHECK(h.sleeps.empty());
  }
}

TEST_CASE("backoff delays are capped") {
  RetryPolicy p;
  CHECK(p.delay_for(0).count() == 200);
  CHECK(p.delay_for(2).count() == 800);
  CHECK(p.delay_for(10).count() == 5000);
}

TEST_CASE("generation validates tags and counts") {
  const auto support = parse_tagged("<subject>Ann</subject> is the <object>mayor</object> .");
  SUBCASE("new examples") {
    Harness h([](const ChatRequest& r) {
      CHECK(r.template_id == TemplateId::kGenerate);
      return text("01: <subject>A</subject> x <object>B</object>\n02: untagged line\n"
                  "03: <subject>C</subject> y <object>D</object>\n"
                  "04: <subject>E</subject> z <object>F</object>");
    });
    const auto out = h.gateway->generate_examples(kRel, support, 2, GenerationMode::kNew, "g");
    REQUIRE(out.size() == 2);
    CHECK(out[0].subject() == "A");
    CHECK(out[1].subject() == "C");
    CHECK(h.transport->last.decoding.temperature == 0.6);
  }
  SUBCASE("paraphrases must keep both mentions") {
    Harness h([](const ChatRequest&) {
      return text("01: <subject>Ann</subject> serves as <object>mayor</object>\n"
                  "02: <subject>Bob</subject> serves as <object>mayor</object>\n"
                  "03: The <object>mayor</object> is <subject>Ann</subject>");
    });
    const auto out =
        h.gateway->generate_examples(kRel, support, 2, GenerationMode::kParaphrase, "p");
    REQUIRE(out.size() == 2);
    CHECK(out[1].text() == "The mayor is Ann");
  }
  SUBCASE("untagged output fails after every attempt") {
    Harness h([](const ChatRequest&) { return text("01: no tags\n02: none here"); });
    CHECK_THROWS_AS(h.gateway->generate_examples(kRel, support, 2, GenerationMode::kNew, "g"),
                    GenerationInvalid);
    CHECK(h.transport->calls == 4);
  }
}

TEST_CASE("summarize falls back to the input") {
  const auto ex = parse_tagged("<subject>Ann</subject> , who was elected <object>mayor</object> in 1999 .");
  Harness good([](const ChatRequest&) {
    return text("Summary:\n<subject>Ann</subject> is <object>mayor</object>");
  });
  const auto s = good.gateway->summarize(ex, "s");
  CHECK_FALSE(s.fell_back);
  CHECK(s.sentence.text() == "Ann is mayor");

  Harness bad([](const ChatRequest&) { return text("Ann is mayor"); });
  const auto f = bad.gateway->summarize(ex, "s");
  CHECK(f.fell_back);
  CHECK(f.sentence == ex);
  CHECK(bad.gateway->stats().summarize_fallbacks == 1);
}

TEST_CASE("diverse pick accepts valid lists and falls back to similarity") {
  const auto pool = pool_of(8);
  const std::vector<double> sim = {0.1, 0.9, 0.3, 0.9, 0.5, 0.0, 0.7, 0.2};
  // Independent oracle: rank by similarity, lower id first on ties.
  std::vector<int> ids(pool.size());
  std::iota(ids.begin(), ids.end(), 1);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    return sim[a - 1] != sim[b - 1] ? sim[a - 1] > sim[b - 1] : a < b;
  });
  const std::vector<int> oracle(ids.begin(), ids.begin() + 4);
  REQUIRE(oracle == std::vector<int>{2, 4, 7, 5});

  Harness ok([](const ChatRequest& r) {
    CHECK(r.bindings->count("SUPPORT_SENTENCE_8"));
    return text("[1, 4, 6, 7]");
  });
  const auto picked = ok.gateway->pick_diverse(pool, kRel, sim, "k");
  CHECK_FALSE(picked.fell_back);
  CHECK(picked.pool_ids == std::vector<int>{1, 4, 6, 7});

  for (const char* reply : {"[1,1,2,3]", "[0, 9]", "[1, 2, 3]", "none", "[1, 2, 3, 9]"}) {
    CAPTURE(reply);
    Harness h([reply](const ChatRequest&) { return text(reply); });
    const auto r = h.gateway->pick_diverse(pool, kRel, sim, "k");
    CHECK(r.fell_back);
    CHECK(r.pool_ids == oracle);
    CHECK(h.gateway->stats().pick_fallbacks == 1);
  }
  Harness h([](const ChatRequest&) { return text("[1]"); });
  CHECK_THROWS_AS(h.gateway->pick_diverse(pool, kRel, std::vector<double>(3, 0.0), "k"),
                  SizeMismatch);
}

TEST_CASE("entity-type check prompt") {
  Harness h([](const ChatRequest& r) {
    CHECK(r.template_id == TemplateId::kNerCheck);
    CHECK(r.bindings->at("ENTITY") == "Ann");
    CHECK(r.bindings->at("ENTITY_TYPE") == "PERSON");
    CHECK(r.bindings->at("SENTENCE") == "Ann is mayor");
    return text("yes");
  });
  const auto s = parse_tagged("<subject>Ann</subject> is <object>mayor</object>");
  CHECK(h.gateway->ner_check(s, s.subject(), "PERSON", "n").yes());
}

TEST_CASE("gateway config validation") {
  auto mock = std::make_shared<MockTransport>();
  CHECK_THROWS_AS(Gateway(nullptr, GatewayConfig{}), InvalidConfig);
  GatewayConfig cfg;
  cfg.max_in_flight = 0;
  CHECK_THROWS_AS(Gateway(mock, cfg), InvalidConfig);
  cfg = GatewayConfig{};
  cfg.generation.max_new_tokens = 4096;
  CHECK_THROWS_AS(Gateway(mock, cfg), InvalidConfig);
}

}  // TEST_SUITE
