#include "relshot/pipeline/filter.hpp"

#include <map>

#include "relshot/core/errors.hpp"

namespace relshot::pipeline {

std::vector<std::size_t> filter_relations(const Episode& ep, const Query& query, NerMode mode,
                                          llm::Gateway* gateway,
                                          const std::string& request_prefix) {
  std::vector<std::size_t> out;
  const bool use_llm = mode == NerMode::kLlm ||
                       (mode == NerMode::kDeterministicThenLlm && !query.gold_types);
  if (use_llm && !gateway) throw InvalidConfig("LLM entity-type filter needs a gateway");

  // (role, type) -> verdict, so relations sharing a type share a call.
  std::map<std::pair<int, std::string>, bool> verdicts;
  const auto check = [&](int role, const std::string& type) {
    const auto key = std::make_pair(role, type);
    if (auto it = verdicts.find(key); it != verdicts.end()) return it->second;
    const auto surface = role == 0 ? query.sentence.subject() : query.sentence.object();
    const bool ok = gateway
                        ->ner_check(query.sentence, surface, type,
                                    request_prefix + (role == 0 ? "/subject/" : "/object/") + type)
                        .yes();
    verdicts.emplace(key, ok);
    return ok;
  };

  for (std::size_t i = 0; i < ep.relations.size(); ++i) {
    const RelationSpec& rel = ep.relations[i].spec;
    bool keep = true;
    if (mode == NerMode::kOff) {
      keep = true;
    } else if (use_llm) {
      keep = check(0, rel.subject_type) && check(1, rel.object_type);
    } else if (query.gold_types) {
      keep = *query.gold_types == rel.type_pair();
    }
    if (keep) out.push_back(i);
  }
  return out;
}

}  // namespace relshot::pipeline
