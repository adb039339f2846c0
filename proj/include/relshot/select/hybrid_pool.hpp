#pragma once

#include <cstdint>
#include <vector>

#include "relshot/core/tagged_sentence.hpp"

namespace relshot::select {

enum class Provenance { kGenerated, kRetrieved };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct PoolEntry {
  int pool_id = 0;  // 1-based, assigned after shuffling
  TaggedSentence sentence;
  Provenance provenance = Provenance::kGenerated;
  std::size_t source_index = 0;  // position within its source list
};

struct CandidatePool {
  std::vector<PoolEntry> entries;
  std::uint64_t shuffle_seed = 0;

  std::size_t size() const noexcept { return entries.size(); }
  /// Throws std::out_of_range for ids outside [1, size()].
  const PoolEntry& at(int pool_id) const;
};

/// Shuffles generated + retrieved sentences under `seed` and numbers them
/// 1..N. Requires equally many of each; throws SizeMismatch otherwise.
CandidatePool assemble_hybrid_pool(const std::vector<TaggedSentence>& generated,
                                   const std::vector<TaggedSentence>& retrieved,
                                   std::uint64_t seed);

}  // namespace relshot::select
