#include "relshot/pipeline/inference.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "relshot/core/random.hpp"

namespace relshot::pipeline {
namespace {

std::string fold(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim_reply(std::string_view s) {
  const auto junk = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'' || c == '`' ||
           c == '.' || c == ',' || c == '*';
  };
  while (!s.empty() && junk(s.front())) s.remove_prefix(1);
  while (!s.empty() && junk(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

llm::Bindings binary_bindings(const RelationSpec& relation,
                              const std::vector<TaggedSentence>& support,
                              const TaggedSentence& query) {
  llm::Bindings b{{"RELATION", relation.name},
                  {"RELATION_DESCRIPTION", relation.description},
                  {"QUERY_SENTENCE", render_tagged(query)}};
  for (std::size_t i = 0; i < support.size(); ++i) {
    b["SUPPORT_SENTENCE_" + std::to_string(i + 1)] = render_tagged(support[i]);
  }
  return b;
}

llm::BinaryDecision infer_binary(const TaggedSentence& query, const RelationSpec& relation,
                                 const std::vector<TaggedSentence>& support,
                                 llm::Gateway& gateway, const std::string& request_id) {
  if (support.empty()) throw std::invalid_argument("infer_binary: empty support list");
  auto prompt = llm::make_prompt(llm::TemplateId::kBinaryRelation,
                                 binary_bindings(relation, support, query));
  return gateway.binary_decide(prompt, request_id);
}

PredictionLabel aggregate(const Episode& episode, const std::vector<RelationDecision>& decisions,
                          std::uint64_t run_seed, const std::string& episode_id,
                          std::size_t query_index) {
  std::vector<std::size_t> yes;
  for (const auto& d : decisions) {
    if (d.yes) yes.push_back(d.relation_index);
  }
  if (yes.empty()) return PredictionLabel::none();
  std::sort(yes.begin(), yes.end());
  std::size_t pick = 0;
  if (yes.size() > 1) {
    Rng rng(SeedPath(run_seed).then("aggregate").then(episode_id).then(query_index).value());
    pick = static_cast<std::size_t>(rng.below(yes.size()));
  }
  return PredictionLabel::relation(episode, episode.relations.at(yes[pick]).spec.name);
}

MulticlassResult parse_multiclass_reply(const Episode& episode, const std::string& reply) {
  MulticlassResult out{PredictionLabel::none(), false, reply};
  const std::string answer = fold(trim_reply(reply));
  if (answer == fold(kNoRelation) || answer == "no" || answer == "none") return out;
  for (const auto& r : episode.relations) {
    if (fold(r.spec.name) == answer) {
      out.label = PredictionLabel::relation(episode, r.spec.name);
      return out;
    }
  }
  out.malformed = true;
  return out;
}

MulticlassResult infer_multiclass(const Episode& episode, const TaggedSentence& query,
                                  const std::vector<std::vector<TaggedSentence>>& supports,
                                  llm::Gateway& gateway, const std::string& request_id) {
  llm::Bindings b{{"QUERY_SENTENCE", render_tagged(query)}};
  for (std::size_t r = 0; r < episode.relations.size(); ++r) {
    const std::string rs = std::to_string(r + 1);
    b["RELATION" + rs] = episode.relations[r].spec.name;
    b["RELATION_DESCRIPTION" + rs] = episode.relations[r].spec.description;
    const auto& s = supports.at(r);
    for (std::size_t i = 0; i < s.size(); ++i) {
      b["SUPPORT_SENTENCE_" + rs + "_" + std::to_string(i + 1)] = render_tagged(s[i]);
    }
  }
  auto prompt = llm::make_prompt(llm::TemplateId::kMultiRelation, std::move(b));
  return parse_multiclass_reply(episode, gateway.complete_text(prompt, request_id));
}

}  // namespace relshot::pipeline
