#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "relshot/core/tagged_sentence.hpp"

namespace relshot::select {

struct DiversityItem {
  TaggedSentence sentence;
  std::vector<float> vector;
};

struct PairStats {
  double overlap_pct = 0.0;  // mean Jaccard token overlap x 100
  double cosine = 0.0;       // mean cosine
  std::size_t pairs = 0;
};

struct DiversityReport {
  PairStats gold_vs_additional;
  /// Absent with a single additional example (no pairs).
  std::optional<PairStats> among_additional;
};

/// Lower-cased whitespace tokens of the untagged text.
std::set<std::string> token_set(const TaggedSentence& s);

/// 100 * |A n B| / |A u B| over token sets.
double token_overlap_pct(const TaggedSentence& a, const TaggedSentence& b);

/// Throws EmptyInput without additional examples.
DiversityReport diversity_report(std::span<const DiversityItem> additional,
                                 const DiversityItem& gold);

}  // namespace relshot::select
