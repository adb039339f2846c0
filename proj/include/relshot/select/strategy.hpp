#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace relshot::select {

enum class StrategyKind {
  kGoldOnly,
  kLlmParaphrase,
  kLlmGenerate,
  kRetrieveClosest,
  kRetrieveCluster,
  kHybrid,
};

enum class Representation { kSentence, kRule };
enum class Clustering { kKMeans, kKMeansPlusPlus };
enum class ClusterPolicy { kRandom, kClosest, kFarthestFirst };

/// How the K support examples for a relation are assembled. shots_k counts
/// the gold support.
struct SelectionStrategy {
  StrategyKind kind = StrategyKind::kGoldOnly;
  Representation representation = Representation::kRule;
  std::optional<Clustering> clustering;
  std::optional<ClusterPolicy> policy;
  int shots_k = 1;
  bool summarize = false;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig when the combination is not one of the supported
  /// settings.
  void validate() const;

  bool needs_store() const noexcept {
    return kind == StrategyKind::kRetrieveClosest ||
           kind == StrategyKind::kRetrieveCluster || kind == StrategyKind::kHybrid;
  }
  bool uses_clusters() const noexcept { return clustering.has_value(); }

  /// Short stable label, e.g. "hybrid/rule/kmeans++/farthest".
  std::string label() const;
};

std::string to_string(StrategyKind k);
std::string to_string(Representation r);
std::string to_string(Clustering c);
std::string to_string(ClusterPolicy p);

StrategyKind strategy_kind_from_string(const std::string& s);
Representation representation_from_string(const std::string& s);
Clustering clustering_from_string(const std::string& s);
ClusterPolicy cluster_policy_from_string(const std::string& s);

nlohmann::json to_json(const SelectionStrategy& s);

}  // namespace relshot::select
