#include "relshot/pipeline/support_builder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "relshot/core/errors.hpp"
#include "relshot/core/random.hpp"
#include "relshot/select/cluster_choice.hpp"
#include "relshot/select/hybrid_pool.hpp"
#include "relshot/select/kmeans.hpp"

namespace relshot::pipeline {
namespace {

using select::StrategyKind;

std::vector<embed::Hit> ranked_excluding(const embed::VectorIndex& index,
                                         std::span<const float> q, const TypePair& pair,
                                         std::size_t m, const std::string& exclude) {
  const std::size_t avail = index.partition_size(pair);
  std::size_t k = m;
  while (true) {
    auto hits = index.retrieve_topk(q, k, pair);
    std::erase_if(hits, [&](const embed::Hit& h) {
      return render_tagged(index.sentence(h.id)) == exclude;
    });
    if (hits.size() >= m || k >= avail) {
      if (hits.size() > m) hits.resize(m);
      return hits;
    }
    k = std::min(avail, k * 2 + 4);
  }
}

std::map<std::string, double> bag_of_words(const TaggedSentence& s) {
  std::map<std::string, double> counts;
  std::istringstream in(s.text());
  std::string tok;
  while (in >> tok) {
    std::transform(tok.begin(), tok.end(), tok.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    counts[tok] += 1.0;
  }
  return counts;
}

select::TraceEntry trace_entry(int pool_id, const char* provenance, const TaggedSentence& s) {
  return {pool_id, provenance, render_tagged(s)};
}

}  // namespace

double lexical_cosine(const TaggedSentence& a, const TaggedSentence& b) {
  const auto ca = bag_of_words(a);
  const auto cb = bag_of_words(b);
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (const auto& [t, x] : ca) {
    aa += x * x;
    if (auto it = cb.find(t); it != cb.end()) ab += x * it->second;
  }
  for (const auto& [t, y] : cb) bb += y * y;
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

Retrieval retrieve_closest(const embed::VectorIndex& index, std::span<const float> q,
                           const TypePair& pair, std::size_t m, const TaggedSentence& exclude) {
  Retrieval r;
  for (const auto& h : ranked_excluding(index, q, pair, m, render_tagged(exclude))) {
    r.ids.push_back(h.id);
  }
  r.pool_n = r.ids.size();
  if (r.ids.size() < m) r.flags.push_back("partition-exhausted");
  return r;
}

Retrieval retrieve_clustered(const embed::VectorIndex& index, std::span<const float> q,
                             const TypePair& pair, std::size_t m, double tau,
                             select::Clustering clustering, select::ClusterPolicy policy,
                             std::uint64_t seed, const TaggedSentence& exclude) {
  Retrieval r;
  const std::string excluded = render_tagged(exclude);
  auto pool = index.retrieve_threshold(q, tau, pair);
  std::erase_if(pool, [&](const embed::Hit& h) {
    return render_tagged(index.sentence(h.id)) == excluded;
  });
  r.pool_n = pool.size();

  std::vector<embed::RecordId> pool_ids;
  for (const auto& h : pool) pool_ids.push_back(h.id);

  if (pool.size() > m) {
    const std::size_t k = select::num_clusters(pool.size());
    r.clusters = k;
    const auto points = select::PointSet::from_index(index, pool_ids);
    const SeedPath path(seed);
    const auto km = select::kmeans(points, k,
                                   clustering == select::Clustering::kKMeansPlusPlus
                                       ? select::KMeansInit::kPlusPlus
                                       : select::KMeansInit::kRandom,
                                   path.then("kmeans").value());
    const std::vector<double> support(q.begin(), q.end());
    for (std::size_t c : select::choose_clusters(km.clusters, support, m, policy,
                                                 path.then("choose").value())) {
      r.ids.push_back(select::representative(km.clusters[c], points));
    }
    if (r.ids.size() < m) {
      r.flags.push_back("cluster-shortfall");
      const std::set<embed::RecordId> taken(r.ids.begin(), r.ids.end());
      for (auto id : pool_ids) {
        if (r.ids.size() == m) break;
        if (!taken.count(id)) r.ids.push_back(id);
      }
    }
    return r;
  }

  r.ids = pool_ids;
  if (pool.size() < m) {
    r.flags.push_back("pool-starvation");
    const std::set<embed::RecordId> taken(r.ids.begin(), r.ids.end());
    // Fetch enough ranked neighbours to cover the pool and the padding.
    for (const auto& h : ranked_excluding(index, q, pair, m + pool.size(), excluded)) {
      if (r.ids.size() == m) break;
      if (!taken.count(h.id)) r.ids.push_back(h.id);
    }
    if (r.ids.size() < m) r.flags.push_back("partition-exhausted");
  }
  return r;
}

SupportSet build_support(const std::string& episode_id, const EpisodeRelation& relation,
                         const RunConfig& config, const Stores& stores, llm::Gateway* gateway,
                         std::uint64_t seed) {
  const auto& strategy = config.strategy;
  const std::size_t extra = static_cast<std::size_t>(strategy.shots_k - 1);
  const std::string rid = episode_id + "/" + relation.spec.name;

  SupportSet out;
  out.shots.push_back(relation.support);
  auto& trace = out.trace;
  trace.episode_id = episode_id;
  trace.relation = relation.spec.name;
  trace.strategy = strategy.label();
  trace.shots = strategy.shots_k;
  trace.gold = render_tagged(relation.support);

  const auto need_gateway = [&] {
    if (!gateway) throw InvalidConfig("strategy '" + strategy.label() + "' needs a gateway");
    return gateway;
  };
  const auto support_vector = [&]() -> std::span<const float> {
    if (!stores.candidates || !stores.supports) {
      throw InvalidConfig("strategy '" + strategy.label() + "' needs embedding stores");
    }
    const auto v = stores.supports->find(relation.support);
    if (!v) {
      throw Error("no stored vector for the gold support of '" + relation.spec.name + "'");
    }
    return *v;
  };
  const auto retrieve = [&](std::size_t m) {
    const auto q = support_vector();
    if (strategy.clustering) {
      return retrieve_clustered(*stores.candidates, q, relation.spec.type_pair(), m, config.tau,
                                *strategy.clustering, *strategy.policy, seed, relation.support);
    }
    return retrieve_closest(*stores.candidates, q, relation.spec.type_pair(), m,
                            relation.support);
  };

  switch (strategy.kind) {
    case StrategyKind::kGoldOnly:
      break;
    case StrategyKind::kLlmParaphrase:
    case StrategyKind::kLlmGenerate: {
      const auto mode = strategy.kind == StrategyKind::kLlmParaphrase
                            ? llm::GenerationMode::kParaphrase
                            : llm::GenerationMode::kNew;
      const auto gen =
          need_gateway()->generate_examples(relation.spec, relation.support, extra, mode,
                                            rid + "/generate");
      for (std::size_t i = 0; i < gen.size(); ++i) {
        out.shots.push_back(gen[i]);
        trace.chosen.push_back(trace_entry(static_cast<int>(i + 1), "generated", gen[i]));
      }
      trace.pool_n = gen.size();
      break;
    }
    case StrategyKind::kRetrieveClosest:
    case StrategyKind::kRetrieveCluster: {
      const Retrieval r = retrieve(extra);
      for (std::size_t i = 0; i < r.ids.size(); ++i) {
        const auto& s = stores.candidates->sentence(r.ids[i]);
        out.shots.push_back(s);
        trace.chosen.push_back(trace_entry(static_cast<int>(i + 1), "retrieved", s));
      }
      trace.pool_n = r.pool_n;
      trace.k = r.clusters;
      trace.flags = r.flags;
      break;
    }
    case StrategyKind::kHybrid: {
      auto* gw = need_gateway();
      const auto generated =
          gw->generate_examples(relation.spec, relation.support, extra,
                                llm::GenerationMode::kNew, rid + "/generate");
      const Retrieval r = retrieve(extra);
      std::vector<TaggedSentence> retrieved;
      for (auto id : r.ids) retrieved.push_back(stores.candidates->sentence(id));
      if (retrieved.size() != generated.size()) {
        throw SizeMismatch("hybrid pool for '" + relation.spec.name + "' has " +
                           std::to_string(generated.size()) + " generated but only " +
                           std::to_string(retrieved.size()) + " retrieved candidates");
      }
      const auto pool = select::assemble_hybrid_pool(generated, retrieved,
                                                     SeedPath(seed).then("shuffle").value());
      std::vector<double> similarity;
      for (const auto& e : pool.entries) {
        similarity.push_back(lexical_cosine(e.sentence, relation.support));
      }
      const auto pick = gw->pick_diverse(pool, relation.spec, similarity, rid + "/pick");
      for (int id : pick.pool_ids) {
        const auto& e = pool.at(id);
        out.shots.push_back(e.sentence);
        trace.chosen.push_back(trace_entry(id, select::to_string(e.provenance), e.sentence));
      }
      trace.pool_n = pool.size();
      trace.k = r.clusters;
      trace.flags = r.flags;
      if (pick.fell_back) trace.flags.push_back("pick-fallback");
      break;
    }
  }

  if (strategy.summarize) {
    auto* gw = need_gateway();
    std::size_t fallbacks = 0;
    for (std::size_t i = 1; i < out.shots.size(); ++i) {
      auto summary = gw->summarize(out.shots[i], rid + "/summarize/" + std::to_string(i));
      fallbacks += summary.fell_back;
      out.shots[i] = std::move(summary.sentence);
      trace.chosen[i - 1].text = render_tagged(out.shots[i]);
    }
    if (fallbacks) trace.flags.push_back("summarize-fallback");
  }
  return out;
}

}  // namespace relshot::pipeline
