#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "relshot/embed/vector_index.hpp"

namespace relshot::select {

using embed::RecordId;

/// Id-addressed points stored row-major in double precision.
class PointSet {
 public:
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  /// Copies the vectors of `ids` out of an index.
  static PointSet from_index(const embed::VectorIndex& index,
                             std::span<const RecordId> ids);

  void add(RecordId id, std::span<const double> v);
  void add(RecordId id, std::span<const float> v);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return ids_.empty(); }
  RecordId id(std::size_t row) const { return ids_[row]; }
  const std::vector<RecordId>& ids() const noexcept { return ids_; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * dim_, dim_};
  }
  /// Throws std::out_of_range for unknown ids.
  std::span<const double> vector(RecordId id) const { return row(rows_.at(id)); }

 private:
  std::size_t dim_;
  std::vector<RecordId> ids_;
  std::vector<double> values_;
  std::unordered_map<RecordId, std::size_t> rows_;
};

struct Cluster {
  std::vector<double> centroid;
  std::vector<RecordId> member_ids;  // in input order
};

enum class KMeansInit { kRandom, kPlusPlus };

inline constexpr int kMaxLloydIterations = 100;

struct KMeansResult {
  std::vector<Cluster> clusters;
  /// Sum of squared distances to the assigned centroid after each iteration.
  std::vector<double> objective_history;
  int iterations = 0;
  bool converged = false;

  double objective() const {
    return objective_history.empty() ? 0.0 : objective_history.back();
  }
};

/// Lloyd's algorithm under squared Euclidean distance. Runs to an assignment
/// fixpoint or kMaxLloydIterations. An empty cluster is reseeded with the
/// point farthest from its current centroid. Throws EmptyInput, KTooLarge.
/// Throws std::logic_error if the objective ever increases.
KMeansResult kmeans(const PointSet& points, std::size_t k, KMeansInit init,
                    std::uint64_t seed, int max_iterations = kMaxLloydIterations);

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Objective of an arbitrary clustering (for auditing).
double clustering_objective(const PointSet& points, const std::vector<Cluster>& clusters);

/// floor(sqrt(n)), exact for every 64-bit n.
std::size_t num_clusters(std::size_t n);

}  // namespace relshot::select
