#include "relshot/embed/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "relshot/core/errors.hpp"

namespace relshot::embed {

const char* to_string(VectorSource s) {
  switch (s) {
    case VectorSource::kSentence:
      return "sentence-embedding";
    case VectorSource::kRule:
      return "rule-embedding";
    case VectorSource::kRuleFallback:
      return "rule-embedding-fallback";
  }
  return "sentence-embedding";
}

VectorSource vector_source_from_string(const std::string& s) {
  if (s == "sentence-embedding") return VectorSource::kSentence;
  if (s == "rule-embedding") return VectorSource::kRule;
  if (s == "rule-embedding-fallback") return VectorSource::kRuleFallback;
  throw Error("unknown vector source '" + s + "'");
}

double dot(std::span<const float> u, std::span<const float> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return acc;
}

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine of vectors with dimensions " +
                            std::to_string(u.size()) + " and " +
                            std::to_string(v.size()));
  }
  return dot(u, v);
}

double l2_norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

VectorIndex VectorIndex::build(std::vector<EmbeddingRecord> records) {
  VectorIndex index;
  if (records.empty()) return index;
  index.dim_ = records.front().vector.size();
  if (index.dim_ == 0) throw DimensionMismatch("zero-dimensional vector");

  for (auto& rec : records) {
    if (rec.vector.size() != index.dim_) {
      throw DimensionMismatch("record " + std::to_string(rec.id) + " has dimension " +
                              std::to_string(rec.vector.size()) + ", store uses " +
                              std::to_string(index.dim_));
    }
    const double norm = l2_norm(rec.vector);
    if (std::abs(norm - 1.0) > kNormTolerance) {
      throw NormViolation("record " + std::to_string(rec.id) + " has L2 norm " +
                          std::to_string(norm));
    }
    if (index.meta_.count(rec.id)) {
      throw DuplicateId("duplicate record id " + std::to_string(rec.id));
    }
    auto [it, inserted] = index.parts_.try_emplace(rec.type_pair);
    Partition& part = it->second;
    Meta meta;
    meta.sentence = std::move(rec.sentence);
    meta.rule = std::move(rec.rule);
    meta.pair = &it->first;
    meta.row = part.ids.size();
    part.ids.push_back(rec.id);
    part.values.insert(part.values.end(), rec.vector.begin(), rec.vector.end());
    index.meta_.emplace(rec.id, std::move(meta));
  }
  return index;
}

std::size_t VectorIndex::partition_size(const TypePair& pair) const {
  const auto it = parts_.find(pair);
  return it == parts_.end() ? 0 : it->second.ids.size();
}

std::vector<TypePair> VectorIndex::partitions() const {
  std::vector<TypePair> out;
  for (const auto& [pair, _] : parts_) out.push_back(pair);
  return out;
}

void VectorIndex::check_query(std::span<const float> query) const {
  if (!empty() && query.size() != dim_) {
    throw DimensionMismatch("query dimension " + std::to_string(query.size()) +
                            " does not match store dimension " + std::to_string(dim_));
  }
}

template <typename Visit>
void VectorIndex::scan(const Partition& part, std::span<const float> query,
                       Visit&& visit) const {
  const float* row = part.values.data();
  for (std::size_t i = 0; i < part.ids.size(); ++i, row += dim_) {
    visit(Hit{part.ids[i], dot(query, std::span<const float>(row, dim_))});
  }
}

std::vector<Hit> VectorIndex::retrieve_topk(std::span<const float> query,
                                            std::size_t k,
                                            const TypePair& pair) const {
  check_query(query);
  const auto it = parts_.find(pair);
  if (k == 0 || it == parts_.end()) return {};

  std::vector<Hit> hits;
  hits.reserve(it->second.ids.size());
  scan(it->second, query, [&](Hit h) { hits.push_back(h); });
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n),
                    hits.end(), ranks_before);
  hits.resize(n);
  return hits;
}

std::vector<Hit> VectorIndex::retrieve_threshold(std::span<const float> query,
                                                 double tau,
                                                 const TypePair& pair) const {
  check_query(query);
  const auto it = parts_.find(pair);
  if (it == parts_.end()) return {};
  std::vector<Hit> hits;
  scan(it->second, query, [&](Hit h) {
    if (h.score >= tau) hits.push_back(h);
  });
  std::sort(hits.begin(), hits.end(), ranks_before);
  return hits;
}

const TaggedSentence& VectorIndex::sentence(RecordId id) const {
  return meta_.at(id).sentence;
}

const TypePair& VectorIndex::type_pair(RecordId id) const {
  return *meta_.at(id).pair;
}

const std::optional<std::string>& VectorIndex::rule(RecordId id) const {
  return meta_.at(id).rule;
}

std::span<const float> VectorIndex::vector(RecordId id) const {
  const Meta& m = meta_.at(id);
  const Partition& part = parts_.at(*m.pair);
  return {part.values.data() + m.row * dim_, dim_};
}

SupportVectors SupportVectors::build(const std::vector<EmbeddingRecord>& records) {
  SupportVectors out;
  for (const auto& rec : records) {
    if (out.dim_ == 0) out.dim_ = rec.vector.size();
    if (rec.vector.size() != out.dim_ || out.dim_ == 0) {
      throw DimensionMismatch("support vector for record " + std::to_string(rec.id) +
                              " has dimension " + std::to_string(rec.vector.size()));
    }
    const double norm = l2_norm(rec.vector);
    if (std::abs(norm - 1.0) > kNormTolerance) {
      throw NormViolation("support record " + std::to_string(rec.id) +
                          " has L2 norm " + std::to_string(norm));
    }
    out.vectors_.insert_or_assign(render_tagged(rec.sentence), rec.vector);
  }
  return out;
}

std::optional<std::span<const float>> SupportVectors::find(
    const TaggedSentence& s) const {
  const auto it = vectors_.find(render_tagged(s));
  if (it == vectors_.end()) return std::nullopt;
  return std::span<const float>(it->second);
}

}  // namespace relshot::embed
