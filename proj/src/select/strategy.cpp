#include "relshot/select/strategy.hpp"

#include <array>
#include <utility>

#include "relshot/core/errors.hpp"

namespace relshot::select {
namespace {

template <typename E, std::size_t N>
E lookup(const std::array<std::pair<const char*, E>, N>& table, const std::string& s,
         const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  std::string names;
  for (const auto& [name, _] : table) names += std::string(names.empty() ? "" : ", ") + name;
  throw InvalidConfig("unknown " + std::string(what) + " '" + s + "' (expected one of " +
                      names + ")");
}

template <typename E, std::size_t N>
std::string name_of(const std::array<std::pair<const char*, E>, N>& table, E v) {
  for (const auto& [name, value] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<const char*, StrategyKind>, 6> kKinds = {{
    {"gold-only", StrategyKind::kGoldOnly},
    {"llm-paraphrase", StrategyKind::kLlmParaphrase},
    {"llm-generate", StrategyKind::kLlmGenerate},
    {"retrieve-closest", StrategyKind::kRetrieveClosest},
    {"retrieve-cluster", StrategyKind::kRetrieveCluster},
    {"hybrid", StrategyKind::kHybrid},
}};
constexpr std::array<std::pair<const char*, Representation>, 2> kReprs = {{
    {"sentence", Representation::kSentence},
    {"rule", Representation::kRule},
}};
constexpr std::array<std::pair<const char*, Clustering>, 2> kClusterings = {{
    {"kmeans", Clustering::kKMeans},
    {"kmeans++", Clustering::kKMeansPlusPlus},
}};
constexpr std::array<std::pair<const char*, ClusterPolicy>, 4> kPolicies = {{
    {"random", ClusterPolicy::kRandom},
    {"closest", ClusterPolicy::kClosest},
    {"farthest", ClusterPolicy::kFarthestFirst},
    {"farthest-first", ClusterPolicy::kFarthestFirst},
}};

}  // namespace

std::string to_string(StrategyKind k) { return name_of(kKinds, k); }
std::string to_string(Representation r) { return name_of(kReprs, r); }
std::string to_string(Clustering c) { return name_of(kClusterings, c); }
std::string to_string(ClusterPolicy p) { return name_of(kPolicies, p); }

StrategyKind strategy_kind_from_string(const std::string& s) {
  return lookup(kKinds, s, "strategy");
}
Representation representation_from_string(const std::string& s) {
  return lookup(kReprs, s, "representation");
}
Clustering clustering_from_string(const std::string& s) {
  return lookup(kClusterings, s, "clustering");
}
ClusterPolicy cluster_policy_from_string(const std::string& s) {
  return lookup(kPolicies, s, "cluster policy");
}

void SelectionStrategy::validate() const {
  if (shots_k != 1 && shots_k != 5 && shots_k != 10) {
    throw InvalidConfig("shots must be 1, 5 or 10 (gold + 0, 4 or 9), got " +
                        std::to_string(shots_k));
  }
  if ((kind == StrategyKind::kGoldOnly) != (shots_k == 1)) {
    throw InvalidConfig(kind == StrategyKind::kGoldOnly
                            ? "gold-only strategy takes exactly 1 shot"
                            : "strategy '" + to_string(kind) + "' needs more than 1 shot");
  }
  if (clustering.has_value() != policy.has_value()) {
    throw InvalidConfig("clustering and cluster policy must be given together");
  }
  if (kind == StrategyKind::kRetrieveCluster && !clustering) {
    throw InvalidConfig("retrieve-cluster needs a clustering and a cluster policy");
  }
  if (clustering && kind != StrategyKind::kRetrieveCluster && kind != StrategyKind::kHybrid) {
    throw InvalidConfig("clustering only applies to retrieve-cluster and hybrid");
  }
  if (summarize && kind == StrategyKind::kGoldOnly) {
    throw InvalidConfig("summarize has nothing to summarize under gold-only");
  }
}

std::string SelectionStrategy::label() const {
  std::string out = to_string(kind);
  if (needs_store()) out += "/" + to_string(representation);
  if (clustering) out += "/" + to_string(*clustering) + "/" + to_string(*policy);
  if (summarize) out += "/summarized";
  return out;
}

nlohmann::json to_json(const SelectionStrategy& s) {
  nlohmann::json j = {{"kind", to_string(s.kind)},
                      {"label", s.label()},
                      {"representation", to_string(s.representation)},
                      {"shots", s.shots_k},
                      {"summarize", s.summarize},
                      {"seed", s.seed}};
  j["clustering"] = s.clustering ? nlohmann::json(to_string(*s.clustering)) : nlohmann::json();
  j["policy"] = s.policy ? nlohmann::json(to_string(*s.policy)) : nlohmann::json();
  return j;
}

}  // namespace relshot::select
