#include "relshot/select/hybrid_pool.hpp"

#include <stdexcept>
#include <string>

#include "relshot/core/errors.hpp"
#include "relshot/core/random.hpp"

namespace relshot::select {

const char* to_string(Provenance p) {
  return p == Provenance::kGenerated ? "generated" : "retrieved";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "generated") return Provenance::kGenerated;
  if (s == "retrieved") return Provenance::kRetrieved;
  throw Error("unknown provenance '" + s + "'");
}

const PoolEntry& CandidatePool::at(int pool_id) const {
  if (pool_id < 1 || static_cast<std::size_t>(pool_id) > entries.size()) {
    throw std::out_of_range("pool id " + std::to_string(pool_id) + " out of range");
  }
  return entries[static_cast<std::size_t>(pool_id - 1)];
}

CandidatePool assemble_hybrid_pool(const std::vector<TaggedSentence>& generated,
                                   const std::vector<TaggedSentence>& retrieved,
                                   std::uint64_t seed) {
  if (generated.size() != retrieved.size()) {
    throw SizeMismatch("hybrid pool needs equal halves, got " +
                       std::to_string(generated.size()) + " generated and " +
                       std::to_string(retrieved.size()) + " retrieved");
  }
  CandidatePool pool;
  pool.shuffle_seed = seed;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    pool.entries.push_back({0, generated[i], Provenance::kGenerated, i});
  }
  for (std::size_t i = 0; i < retrieved.size(); ++i) {
    pool.entries.push_back({0, retrieved[i], Provenance::kRetrieved, i});
  }
  Rng rng(seed);
  for (std::size_t i = pool.entries.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(pool.entries[i - 1], pool.entries[j]);
  }
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    pool.entries[i].pool_id = static_cast<int>(i + 1);
  }
  return pool;
}

}  // namespace relshot::select
