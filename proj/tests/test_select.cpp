#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "relshot/core/errors.hpp"
#include "relshot/select/cluster_choice.hpp"
#include "relshot/select/diversity.hpp"
#include "relshot/select/hybrid_pool.hpp"
#include "relshot/select/kmeans.hpp"
#include "relshot/select/strategy.hpp"
#include "relshot/select/trace.hpp"

using namespace relshot;
using namespace relshot::select;

namespace {

PointSet blobs(std::uint64_t seed, std::size_t n, std::size_t centers) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> c(-10.0, 10.0);
  std::normal_distribution<double> noise(0.0, 0.7);
  std::vector<std::array<double, 2>> mu(centers);
  for (auto& m : mu) m = {c(gen), c(gen)};
  PointSet ps(2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = mu[i % centers];
    const double p[2] = {m[0] + noise(gen), m[1] + noise(gen)};
    ps.add(static_cast<RecordId>(i), std::span<const double>(p, 2));
  }
  return ps;
}

Cluster cluster_at(std::vector<double> centroid) { return {std::move(centroid), {}}; }

TaggedSentence ts(const std::string& raw) { return parse_tagged(raw); }

}  // namespace

TEST_SUITE("select") {

TEST_CASE("num_clusters is floor sqrt") {
  CHECK(num_clusters(1) == 1);
  CHECK(num_clusters(3) == 1);
  CHECK(num_clusters(4) == 2);
  CHECK(num_clusters(64) == 8);
  CHECK(num_clusters(80) == 8);
  CHECK(num_clusters(81) == 9);
  CHECK(num_clusters(std::size_t{1} << 62) == std::size_t{1} << 31);
}

TEST_CASE("kmeans partitions every point, objective never rises") {
  for (auto init : {KMeansInit::kRandom, KMeansInit::kPlusPlus}) {
    const auto ps = blobs(5, 64, 8);
    const auto r = kmeans(ps, 8, init, 42);
    REQUIRE(r.clusters.size() == 8);
    std::set<RecordId> seen;
    for (const auto& c : r.clusters) {
      CHECK_FALSE(c.member_ids.empty());
      for (auto id : c.member_ids) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == 64);
    CHECK(r.iterations <= kMaxLloydIterations);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
      CHECK(r.objective_history[i] <= r.objective_history[i - 1] + 1e-9);
    }
    CHECK(clustering_objective(ps, r.clusters) == doctest::Approx(r.objective()));
  }
}

TEST_CASE("kmeans is deterministic under a seed and validates k") {
  const auto ps = blobs(9, 30, 3);
  const auto a = kmeans(ps, 5, KMeansInit::kPlusPlus, 7);
  const auto b = kmeans(ps, 5, KMeansInit::kPlusPlus, 7);
  REQUIRE(a.clusters.size() == b.clusters.size());
  for (std::size_t i = 0; i < a.clusters.size(); ++i) {
    CHECK(a.clusters[i].member_ids == b.clusters[i].member_ids);
  }
  CHECK_THROWS_AS(kmeans(ps, 0, KMeansInit::kRandom, 1), KTooLarge);
  CHECK_THROWS_AS(kmeans(ps, 31, KMeansInit::kRandom, 1), KTooLarge);
  CHECK_THROWS_AS(kmeans(PointSet(2), 1, KMeansInit::kRandom, 1), EmptyInput);
}

TEST_CASE("k equal to n gives singletons with zero objective") {
  const auto ps = blobs(1, 6, 6);
  const auto r = kmeans(ps, 6, KMeansInit::kPlusPlus, 3);
  for (const auto& c : r.clusters) CHECK(c.member_ids.size() == 1);
  CHECK(r.objective() == doctest::Approx(0.0));
}

TEST_CASE("duplicate points do not leave clusters empty") {
  PointSet ps(2);
  const double p[2] = {1.0, 1.0};
  for (RecordId i = 0; i < 4; ++i) ps.add(i, std::span<const double>(p, 2));
  const double q[2] = {5.0, 5.0};
  ps.add(4, std::span<const double>(q, 2));
  const auto r = kmeans(ps, 3, KMeansInit::kRandom, 0);
  for (const auto& c : r.clusters) CHECK_FALSE(c.member_ids.empty());
}

TEST_CASE("farthest-first on the 1-D hand case") {
  std::vector<Cluster> cs;
  for (double x : {1.0, 2.0, 10.0, 11.0}) cs.push_back(cluster_at({x}));
  const std::vector<double> support{0.0};
  const auto pick = choose_clusters(cs, support, 2, ClusterPolicy::kFarthestFirst, 0,
                                    DistanceMetric::kEuclidean);
  REQUIRE(pick.size() == 2);
  CHECK(cs[pick[0]].centroid[0] == 11.0);
  CHECK(cs[pick[1]].centroid[0] == 1.0);
}

TEST_CASE("closest orders by distance, ties to lower index") {
  std::vector<Cluster> cs{cluster_at({3.0}), cluster_at({-1.0}), cluster_at({1.0}),
                          cluster_at({5.0})};
  const std::vector<double> support{0.0};
  const auto pick = choose_clusters(cs, support, 3, ClusterPolicy::kClosest, 0,
                                    DistanceMetric::kEuclidean);
  CHECK(pick == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("cosine distance ignores scale") {
  std::vector<Cluster> cs{cluster_at({10.0, 0.0}), cluster_at({0.0, 0.1}),
                          cluster_at({1.0, 1.0})};
  const std::vector<double> support{1.0, 0.0};
  const auto pick = choose_clusters(cs, support, 3, ClusterPolicy::kClosest, 0);
  CHECK(pick == std::vector<std::size_t>{0, 2, 1});
}

TEST_CASE("random policy samples without replacement, reproducibly") {
  std::vector<Cluster> cs;
  for (int i = 0; i < 10; ++i) cs.push_back(cluster_at({static_cast<double>(i)}));
  const std::vector<double> support{0.0};
  const auto a = choose_clusters(cs, support, 4, ClusterPolicy::kRandom, 99);
  CHECK(a == choose_clusters(cs, support, 4, ClusterPolicy::kRandom, 99));
  CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 4);
  CHECK(choose_clusters(cs, support, 20, ClusterPolicy::kRandom, 1).size() == 10);
  // Every cluster gets picked first under some seed.
  std::set<std::size_t> firsts;
  for (std::uint64_t s = 0; s < 200; ++s) {
    firsts.insert(choose_clusters(cs, support, 1, ClusterPolicy::kRandom, s)[0]);
  }
  CHECK(firsts.size() == 10);
}

TEST_CASE("representative is the member nearest the centroid by cosine") {
  PointSet ps(2);
  const double a[2] = {1.0, 0.0}, b[2] = {0.8, 0.6}, c[2] = {0.0, 1.0};
  ps.add(10, std::span<const double>(a, 2));
  ps.add(11, std::span<const double>(b, 2));
  ps.add(12, std::span<const double>(c, 2));
  Cluster cl{{0.5, 0.5}, {10, 11, 12}};
  CHECK(representative(cl, ps) == 11);
  Cluster tie{{1.0, 1.0}, {10, 12}};
  CHECK(representative(tie, ps) == 10);
}

TEST_CASE("strategy validation") {
  SelectionStrategy s;
  s.kind = StrategyKind::kGoldOnly;
  s.shots_k = 1;
  CHECK_NOTHROW(s.validate());
  s.shots_k = 5;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);

  s.kind = StrategyKind::kRetrieveCluster;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);  // needs clustering + policy
  s.clustering = Clustering::kKMeansPlusPlus;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);  // policy missing
  s.policy = ClusterPolicy::kFarthestFirst;
  CHECK_NOTHROW(s.validate());
  CHECK(s.label() == "retrieve-cluster/rule/kmeans++/farthest");
  s.shots_k = 3;
  CHECK_THROWS_AS(s.validate(), InvalidConfig);

  SelectionStrategy c;
  c.kind = StrategyKind::kRetrieveClosest;
  c.shots_k = 10;
  c.clustering = Clustering::kKMeans;
  c.policy = ClusterPolicy::kRandom;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);

  SelectionStrategy h;
  h.kind = StrategyKind::kHybrid;
  h.shots_k = 5;
  CHECK_NOTHROW(h.validate());

  CHECK(cluster_policy_from_string("farthest-first") == ClusterPolicy::kFarthestFirst);
  CHECK(strategy_kind_from_string("llm-generate") == StrategyKind::kLlmGenerate);
  CHECK_THROWS(strategy_kind_from_string("bogus"));
}

TEST_CASE("hybrid pool keeps the provenance multiset and numbers 1..N") {
  std::vector<TaggedSentence> gen, ret;
  for (int i = 0; i < 9; ++i) {
    gen.push_back(ts("<subject>g" + std::to_string(i) + "</subject> <object>x</object>"));
    ret.push_back(ts("<subject>r" + std::to_string(i) + "</subject> <object>x</object>"));
  }
  const auto pool = assemble_hybrid_pool(gen, ret, 17);
  REQUIRE(pool.size() == 18);
  std::multiset<std::string> want, got;
  for (const auto& s : gen) want.insert("g:" + render_tagged(s));
  for (const auto& s : ret) want.insert("r:" + render_tagged(s));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& e = pool.entries[i];
    CHECK(e.pool_id == static_cast<int>(i + 1));
    got.insert((e.provenance == Provenance::kGenerated ? "g:" : "r:") + render_tagged(e.sentence));
    const auto& src = e.provenance == Provenance::kGenerated ? gen : ret;
    CHECK(render_tagged(src[e.source_index]) == render_tagged(e.sentence));
  }
  CHECK(got == want);
  CHECK(pool.at(18).pool_id == 18);
  CHECK_THROWS_AS(pool.at(0), std::out_of_range);
  CHECK_THROWS_AS(pool.at(19), std::out_of_range);

  const auto again = assemble_hybrid_pool(gen, ret, 17);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(render_tagged(again.entries[i].sentence) == render_tagged(pool.entries[i].sentence));
  }
  gen.pop_back();
  CHECK_THROWS_AS(assemble_hybrid_pool(gen, ret, 17), SizeMismatch);
}

TEST_CASE("token overlap is Jaccard over lower-cased untagged tokens") {
  const auto a = ts("<subject>The</subject> cat <object>sat</object>");
  const auto b = ts("<subject>the</subject> dog <object>SAT</object> down");
  // {the, cat, sat} vs {the, dog, sat, down}: 2 shared of 5.
  CHECK(token_overlap_pct(a, b) == doctest::Approx(40.0));
  CHECK(token_overlap_pct(a, a) == doctest::Approx(100.0));
}

TEST_CASE("diversity report averages pairs") {
  const DiversityItem gold{ts("<subject>a</subject> b <object>c</object>"), {1.0f, 0.0f}};
  const std::vector<DiversityItem> extra{
      {ts("<subject>a</subject> b <object>c</object>"), {1.0f, 0.0f}},
      {ts("<subject>x</subject> y <object>z</object>"), {0.0f, 1.0f}},
      {ts("<subject>a</subject> y <object>z</object>"), {0.6f, 0.8f}}};
  const auto r = diversity_report(extra, gold);
  CHECK(r.gold_vs_additional.pairs == 3);
  CHECK(r.gold_vs_additional.overlap_pct == doctest::Approx((100.0 + 0.0 + 20.0) / 3));
  CHECK(r.gold_vs_additional.cosine == doctest::Approx((1.0 + 0.0 + 0.6) / 3));
  REQUIRE(r.among_additional);
  CHECK(r.among_additional->pairs == 3);
  // pairs: (1,2) 0%, cos 0; (1,3) 20%, cos .6; (2,3) 50%, cos .8
  CHECK(r.among_additional->overlap_pct == doctest::Approx(70.0 / 3));
  CHECK(r.among_additional->cosine == doctest::Approx(1.4 / 3));

  const auto single = diversity_report(std::span(extra).first(1), gold);
  CHECK_FALSE(single.among_additional);
  CHECK_THROWS_AS(diversity_report({}, gold), EmptyInput);
}

TEST_CASE("selection trace JSON round trip") {
  SelectionTrace t;
  t.episode_id = "e1";
  t.relation = "per:title";
  t.strategy = "hybrid/rule";
  t.shots = 5;
  t.gold = "<subject>a</subject> <object>b</object>";
  t.chosen = {{3, "generated", "<subject>c</subject> <object>d</object>"},
              {1, "retrieved", "<subject>e</subject> <object>f</object>"}};
  t.pool_n = 8;
  t.k = 2;
  t.flags = {"pick-fallback"};
  const auto back = trace_from_json(to_json(t));
  CHECK(to_json(back) == to_json(t));
}

}  // TEST_SUITE
