#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relshot/core/episode.hpp"
#include "relshot/llm/gateway.hpp"

namespace relshot::pipeline {

/// Bindings for the binary-relation template: N is the support count.
llm::Bindings binary_bindings(const RelationSpec& relation,
                              const std::vector<TaggedSentence>& support,
                              const TaggedSentence& query);

/// One yes/no call for (query, relation). Throws std::invalid_argument on an
/// empty support list; gateway errors propagate.
llm::BinaryDecision infer_binary(const TaggedSentence& query, const RelationSpec& relation,
                                 const std::vector<TaggedSentence>& support,
                                 llm::Gateway& gateway, const std::string& request_id);

struct RelationDecision {
  std::size_t relation_index = 0;
  bool yes = false;
};

/// Zero yes: no_relation. One yes: that relation. Several: a uniform draw
/// from the yes-set under a seed derived from (run_seed, episode_id, query_index).
PredictionLabel aggregate(const Episode& episode, const std::vector<RelationDecision>& decisions,
                          std::uint64_t run_seed, const std::string& episode_id,
                          std::size_t query_index);

struct MulticlassResult {
  PredictionLabel label;
  bool malformed = false;  // reply named no known relation
  std::string reply;
};

/// Maps a free-text reply onto a relation name (exact, case-insensitive,
/// surrounding quotes and punctuation trimmed) or no_relation.
MulticlassResult parse_multiclass_reply(const Episode& episode, const std::string& reply);

/// One multi-relation call listing all five relations with their supports
/// (`supports` aligned with episode.relations).
MulticlassResult infer_multiclass(const Episode& episode, const TaggedSentence& query,
                                  const std::vector<std::vector<TaggedSentence>>& supports,
                                  llm::Gateway& gateway, const std::string& request_id);

}  // namespace relshot::pipeline
