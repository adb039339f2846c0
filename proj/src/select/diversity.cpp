#include "relshot/select/diversity.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "relshot/core/errors.hpp"
#include "relshot/embed/vector_index.hpp"

namespace relshot::select {

std::set<std::string> token_set(const TaggedSentence& s) {
  std::set<std::string> out;
  std::istringstream in(s.text());
  std::string tok;
  while (in >> tok) {
    std::transform(tok.begin(), tok.end(), tok.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.insert(std::move(tok));
  }
  return out;
}

double token_overlap_pct(const TaggedSentence& a, const TaggedSentence& b) {
  const auto ta = token_set(a);
  const auto tb = token_set(b);
  std::size_t common = 0;
  for (const auto& t : ta) common += tb.count(t);
  const std::size_t uni = ta.size() + tb.size() - common;
  return uni == 0 ? 100.0 : 100.0 * static_cast<double>(common) / static_cast<double>(uni);
}

namespace {

void accumulate(PairStats& stats, const DiversityItem& a, const DiversityItem& b) {
  stats.overlap_pct += token_overlap_pct(a.sentence, b.sentence);
  stats.cosine += embed::cosine(a.vector, b.vector);
  ++stats.pairs;
}

void finish(PairStats& stats) {
  if (stats.pairs == 0) return;
  stats.overlap_pct /= static_cast<double>(stats.pairs);
  stats.cosine /= static_cast<double>(stats.pairs);
}

}  // namespace

DiversityReport diversity_report(std::span<const DiversityItem> additional,
                                 const DiversityItem& gold) {
  if (additional.empty()) throw EmptyInput("diversity report needs additional examples");
  DiversityReport report;
  for (const auto& a : additional) accumulate(report.gold_vs_additional, gold, a);
  finish(report.gold_vs_additional);
  if (additional.size() > 1) {
    PairStats among;
    for (std::size_t i = 0; i < additional.size(); ++i) {
      for (std::size_t j = i + 1; j < additional.size(); ++j) {
        accumulate(among, additional[i], additional[j]);
      }
    }
    finish(among);
    report.among_additional = among;
  }
  return report;
}

}  // namespace relshot::select
