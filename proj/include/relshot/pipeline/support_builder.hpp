#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "relshot/core/episode.hpp"
#include "relshot/llm/gateway.hpp"
#include "relshot/pipeline/config.hpp"
#include "relshot/select/trace.hpp"

namespace relshot::pipeline {

/// K support sentences for one relation, gold first, plus how they were chosen.
struct SupportSet {
  std::vector<TaggedSentence> shots;
  select::SelectionTrace trace;
};

/// Result of a retrieval step: ranked record ids plus bookkeeping for the trace.
struct Retrieval {
  std::vector<embed::RecordId> ids;
  std::size_t pool_n = 0;
  std::size_t clusters = 0;
  std::vector<std::string> flags;
};

/// The m candidates most similar to `query_vec` in the `pair` partition,
/// skipping records whose text equals `exclude`.
Retrieval retrieve_closest(const embed::VectorIndex& index, std::span<const float> query_vec,
                           const TypePair& pair, std::size_t m, const TaggedSentence& exclude);

/// Threshold pool at `tau`, k = floor(sqrt(n)) clusters, m clusters chosen by
/// `policy`, one representative each. A pool smaller than m is padded with
/// the closest candidates below tau ("pool-starvation"); fewer clusters than
/// m are topped up with the closest unchosen pool members ("cluster-shortfall").
Retrieval retrieve_clustered(const embed::VectorIndex& index, std::span<const float> query_vec,
                             const TypePair& pair, std::size_t m, double tau,
                             select::Clustering clustering, select::ClusterPolicy policy,
                             std::uint64_t seed, const TaggedSentence& exclude);

/// Bag-of-words cosine on lower-cased untagged tokens; used to rank hybrid
/// pool entries when the pick reply is unusable.
double lexical_cosine(const TaggedSentence& a, const TaggedSentence& b);

/// Assembles the K-shot support list for `relation` under `config.strategy`.
/// `seed` is the relation's child seed. Throws on gateway failures and on a
/// missing support vector.
SupportSet build_support(const std::string& episode_id, const EpisodeRelation& relation,
                         const RunConfig& config, const Stores& stores, llm::Gateway* gateway,
                         std::uint64_t seed);

}  // namespace relshot::pipeline
