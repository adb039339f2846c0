#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relshot/core/episode.hpp"
#include "relshot/core/tagged_sentence.hpp"

namespace relshot::embed {

using RecordId = std::int64_t;

inline constexpr double kNormTolerance = 1e-6;

enum class VectorSource { kSentence, kRule, kRuleFallback };

const char* to_string(VectorSource s);
VectorSource vector_source_from_string(const std::string& s);

struct EmbeddingRecord {
  RecordId id = 0;
  TaggedSentence sentence;
  std::vector<float> vector;
  TypePair type_pair;
  std::optional<std::string> rule;
  VectorSource source = VectorSource::kSentence;
};

/// Dot product accumulated in double, in index order.
double dot(std::span<const float> u, std::span<const float> v);

/// Cosine of two unit vectors, i.e. their dot product. Throws DimensionMismatch.
double cosine(std::span<const float> u, std::span<const float> v);

double l2_norm(std::span<const float> v);

struct Hit {
  RecordId id;
  double score;
  friend bool operator==(const Hit&, const Hit&) = default;
};

/// Descending score, ascending id on ties.
inline bool ranks_before(const Hit& a, const Hit& b) {
  return a.score != b.score ? a.score > b.score : a.id < b.id;
}

/// Exact cosine index over unit vectors, partitioned by entity-type pair.
/// Immutable after build(); all queries are const and thread-safe.
class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(VectorIndex&&) = default;
  VectorIndex& operator=(VectorIndex&&) = default;
  VectorIndex(const VectorIndex&) = delete;
  VectorIndex& operator=(const VectorIndex&) = delete;

  /// Throws DuplicateId, DimensionMismatch or NormViolation.
  static VectorIndex build(std::vector<EmbeddingRecord> records);

  std::size_t size() const noexcept { return meta_.size(); }
  std::size_t dimension() const noexcept { return dim_; }
  bool empty() const noexcept { return meta_.empty(); }

  std::size_t partition_size(const TypePair& pair) const;
  std::vector<TypePair> partitions() const;

  /// Top-k by cosine within the `pair` partition; length min(k, partition size).
  std::vector<Hit> retrieve_topk(std::span<const float> query, std::size_t k,
                                 const TypePair& pair) const;

  /// Every record in the `pair` partition with cosine >= tau, ranked.
  std::vector<Hit> retrieve_threshold(std::span<const float> query, double tau,
                                      const TypePair& pair) const;

  bool contains(RecordId id) const { return meta_.count(id) > 0; }
  const TaggedSentence& sentence(RecordId id) const;
  const TypePair& type_pair(RecordId id) const;
  const std::optional<std::string>& rule(RecordId id) const;
  std::span<const float> vector(RecordId id) const;

 private:
  struct Partition {
    std::vector<RecordId> ids;
    std::vector<float> values;  // row-major, ids.size() x dim_
  };
  struct Meta {
    TaggedSentence sentence;
    std::optional<std::string> rule;
    const TypePair* pair = nullptr;
    std::size_t row = 0;
  };

  void check_query(std::span<const float> query) const;
  template <typename Visit>
  void scan(const Partition& part, std::span<const float> query,
            Visit&& visit) const;

  std::size_t dim_ = 0;
  std::map<TypePair, Partition> parts_;
  std::unordered_map<RecordId, Meta> meta_;
};

/// Vectors for gold support sentences, looked up by their rendered text.
class SupportVectors {
 public:
  SupportVectors() = default;
  static SupportVectors build(const std::vector<EmbeddingRecord>& records);

  /// nullopt when the sentence has no stored vector.
  std::optional<std::span<const float>> find(const TaggedSentence& s) const;
  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t dimension() const noexcept { return dim_; }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

}  // namespace relshot::embed
