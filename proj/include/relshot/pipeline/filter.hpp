#pragma once

#include <string>
#include <vector>

#include "relshot/core/episode.hpp"
#include "relshot/llm/gateway.hpp"
#include "relshot/pipeline/config.hpp"

namespace relshot::pipeline {

/// Indices (into episode.relations) of the relations whose expected entity
/// types are compatible with the query.
///   off:           every relation
///   deterministic: gold query types equal the relation's pair; a query
///                  without gold types keeps every relation
///   llm:           ner_check passes for the subject and then the object
///   deterministic-then-llm: deterministic when gold types exist, else llm
/// The gateway is only touched in the llm modes and may be null otherwise.
std::vector<std::size_t> filter_relations(const Episode& episode, const Query& query,
                                          NerMode mode, llm::Gateway* gateway,
                                          const std::string& request_prefix = "ner");

}  // namespace relshot::pipeline
