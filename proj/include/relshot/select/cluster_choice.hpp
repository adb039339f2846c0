#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relshot/select/kmeans.hpp"
#include "relshot/select/strategy.hpp"

namespace relshot::select {

enum class DistanceMetric {
  kCosine,     // 1 - cos(a, b); raw (unnormalized) vectors
  kEuclidean,  // ||a - b||
};

double distance(std::span<const double> a, std::span<const double> b,
                DistanceMetric metric);

/// Cosine of arbitrary vectors; 0 when either has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Picks min(m, clusters.size()) clusters and returns their indices in
/// selection order.
///   random:         uniform sample without replacement under `seed`
///   closest:        ascending centroid-to-support distance
///   farthest-first: the centroid farthest from the support first, then
///                   repeatedly the one maximizing its minimum distance to
///                   the centroids already chosen
/// Ties resolve to the lowest cluster index.
std::vector<std::size_t> choose_clusters(const std::vector<Cluster>& clusters,
                                         std::span<const double> support,
                                         std::size_t m, ClusterPolicy policy,
                                         std::uint64_t seed,
                                         DistanceMetric metric = DistanceMetric::kCosine);

/// Member closest (by cosine) to the cluster centroid; earliest member on ties.
RecordId representative(const Cluster& cluster, const PointSet& points);

/// First min(m, ranked.size()) entries.
std::vector<RecordId> select_closest(std::span<const RecordId> ranked, std::size_t m);

}  // namespace relshot::select
