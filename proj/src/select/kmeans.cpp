#include "relshot/select/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "relshot/core/errors.hpp"
#include "relshot/core/random.hpp"

namespace relshot::select {

PointSet PointSet::from_index(const embed::VectorIndex& index,
                              std::span<const RecordId> ids) {
  PointSet out(index.dimension());
  for (RecordId id : ids) out.add(id, index.vector(id));
  return out;
}

void PointSet::add(RecordId id, std::span<const double> v) {
  if (v.size() != dim_) {
    throw DimensionMismatch("point " + std::to_string(id) + " has dimension " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(dim_));
  }
  if (!rows_.emplace(id, ids_.size()).second) {
    throw DuplicateId("point id " + std::to_string(id) + " added twice");
  }
  ids_.push_back(id);
  values_.insert(values_.end(), v.begin(), v.end());
}

void PointSet::add(RecordId id, std::span<const float> v) {
  std::vector<double> tmp(v.begin(), v.end());
  add(id, std::span<const double>(tmp));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::size_t num_clusters(std::size_t n) {
  auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (k * k > n) --k;
  while ((k + 1) * (k + 1) <= n) ++k;
  return k;
}

namespace {

using Centroids = std::vector<std::vector<double>>;

std::vector<std::size_t> random_rows(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(rows[i], rows[j]);
  }
  rows.resize(k);
  return rows;
}

/// D^2 sampling: each new centre is drawn with probability proportional to
/// the squared distance from a point to its nearest chosen centre.
std::vector<std::size_t> plus_plus_rows(const PointSet& pts, std::size_t k, Rng& rng) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  chosen.push_back(static_cast<std::size_t>(rng.below(n)));
  std::vector<double> mind(n, std::numeric_limits<double>::infinity());

  while (chosen.size() < k) {
    const auto last = pts.row(chosen.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mind[i] = std::min(mind[i], squared_distance(pts.row(i), last));
      total += mind[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double running = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mind[i] <= 0.0) continue;
        running += mind[i];
        pick = i;
        if (running > target) break;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a centre; fall back to uniform.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(i);
      }
      pick = rest[static_cast<std::size_t>(rng.below(rest.size()))];
    }
    chosen.push_back(pick);
  }
  return chosen;
}

std::size_t nearest(const PointSet& pts, std::size_t row, const Centroids& c) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double d = squared_distance(pts.row(row), c[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans(const PointSet& pts, std::size_t k, KMeansInit init,
                    std::uint64_t seed, int max_iterations) {
  const std::size_t n = pts.size();
  if (n == 0) throw EmptyInput("k-means on an empty point set");
  if (k == 0) throw KTooLarge("k must be at least 1");
  if (k > n) {
    throw KTooLarge("k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " points");
  }

  Rng rng(seed);
  const auto seeds = init == KMeansInit::kPlusPlus ? plus_plus_rows(pts, k, rng)
                                                   : random_rows(n, k, rng);
  Centroids centroids;
  for (std::size_t r : seeds) {
    const auto row = pts.row(r);
    centroids.emplace_back(row.begin(), row.end());
  }

  KMeansResult result;
  std::vector<std::size_t> assign(n, k);  // k == unassigned
  double previous = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest(pts, i, centroids);
      changed |= c != assign[i];
      assign[i] = c;
    }

    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t c : assign) ++sizes[c];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assign[i]] < 2) continue;
        const double d = squared_distance(pts.row(i), centroids[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[assign[far]];
      assign[far] = c;
      sizes[c] = 1;
      changed = true;
    }

    if (!changed) {
      result.converged = true;
      break;
    }

    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = pts.row(i);
      auto& c = centroids[assign[i]];
      for (std::size_t d = 0; d < row.size(); ++d) c[d] += row[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (double& x : centroids[c]) x /= static_cast<double>(sizes[c]);
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      objective += squared_distance(pts.row(i), centroids[assign[i]]);
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(previous));
    if (std::isfinite(previous) && objective > previous + slack) {
      throw std::logic_error("k-means objective increased from " +
                             std::to_string(previous) + " to " +
                             std::to_string(objective));
    }
    result.objective_history.push_back(objective);
    result.iterations = iter;
    previous = objective;
  }

  result.clusters.resize(k);
  for (std::size_t c = 0; c < k; ++c) result.clusters[c].centroid = centroids[c];
  for (std::size_t i = 0; i < n; ++i) {
    result.clusters[assign[i]].member_ids.push_back(pts.id(i));
  }
  return result;
}

double clustering_objective(const PointSet& pts, const std::vector<Cluster>& clusters) {
  double total = 0.0;
  for (const auto& c : clusters) {
    for (RecordId id : c.member_ids) total += squared_distance(pts.vector(id), c.centroid);
  }
  return total;
}

}  // namespace relshot::select
