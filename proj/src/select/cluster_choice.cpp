#include "relshot/select/cluster_choice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relshot/core/errors.hpp"
#include "relshot/core/random.hpp"

namespace relshot::select {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine of vectors with dimensions " +
                            std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double distance(std::span<const double> a, std::span<const double> b,
                DistanceMetric metric) {
  if (metric == DistanceMetric::kCosine) return 1.0 - cosine_similarity(a, b);
  if (a.size() != b.size()) throw DimensionMismatch("distance between mismatched vectors");
  return std::sqrt(squared_distance(a, b));
}

std::vector<std::size_t> choose_clusters(const std::vector<Cluster>& clusters,
                                         std::span<const double> support,
                                         std::size_t m, ClusterPolicy policy,
                                         std::uint64_t seed, DistanceMetric metric) {
  const std::size_t k = clusters.size();
  m = std::min(m, k);
  if (m == 0) return {};

  std::vector<double> to_support(k);
  for (std::size_t c = 0; c < k; ++c) {
    to_support[c] = distance(clusters[c].centroid, support, metric);
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);

  switch (policy) {
    case ClusterPolicy::kRandom: {
      Rng rng(seed);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(k - i));
        std::swap(order[i], order[j]);
      }
      order.resize(m);
      return order;
    }
    case ClusterPolicy::kClosest: {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return to_support[a] < to_support[b];
      });
      order.resize(m);
      return order;
    }
    case ClusterPolicy::kFarthestFirst:
      break;
  }

  std::vector<std::size_t> chosen;
  std::vector<bool> taken(k, false);
  std::size_t first = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (to_support[c] > to_support[first]) first = c;
  }
  chosen.push_back(first);
  taken[first] = true;

  std::vector<double> min_dist(k, std::numeric_limits<double>::infinity());
  while (chosen.size() < m) {
    const auto& last = clusters[chosen.back()].centroid;
    std::size_t best = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (taken[c]) continue;
      min_dist[c] = std::min(min_dist[c], distance(clusters[c].centroid, last, metric));
      if (best == k || min_dist[c] > min_dist[best]) best = c;
    }
    chosen.push_back(best);
    taken[best] = true;
  }
  return chosen;
}

RecordId representative(const Cluster& cluster, const PointSet& points) {
  if (cluster.member_ids.empty()) throw EmptyInput("representative of an empty cluster");
  RecordId best = cluster.member_ids.front();
  double best_cos = -std::numeric_limits<double>::infinity();
  for (RecordId id : cluster.member_ids) {
    const double c = cosine_similarity(points.vector(id), cluster.centroid);
    if (c > best_cos) {
      best_cos = c;
      best = id;
    }
  }
  return best;
}

std::vector<RecordId> select_closest(std::span<const RecordId> ranked, std::size_t m) {
  const std::size_t n = std::min(m, ranked.size());
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace relshot::select
