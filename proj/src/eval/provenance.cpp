#include "relshot/eval/provenance.hpp"

#include <cstdio>
#include <map>

namespace relshot::eval {

PickCount count_picks(const select::SelectionTrace& trace) {
  PickCount c;
  for (const auto& e : trace.chosen) {
    if (e.provenance == "generated") {
      ++c.generated;
    } else if (e.provenance == "retrieved") {
      ++c.retrieved;
    }
  }
  return c;
}

std::vector<ProvenanceRow> pick_provenance(std::span<const select::SelectionTrace> traces) {
  std::map<std::pair<std::string, int>, ProvenanceRow> groups;
  for (const auto& t : traces) {
    auto& row = groups[{t.strategy, t.shots}];
    row.strategy = t.strategy;
    row.shots = t.shots;
    ++row.traces;
    const auto c = count_picks(t);
    row.mean_generated += static_cast<double>(c.generated);
    row.mean_retrieved += static_cast<double>(c.retrieved);
  }
  std::vector<ProvenanceRow> out;
  for (auto& [key, row] : groups) {
    row.mean_generated /= static_cast<double>(row.traces);
    row.mean_retrieved /= static_cast<double>(row.traces);
    out.push_back(row);
  }
  return out;
}

std::string format_provenance(const ProvenanceRow& row) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f/%.2f", row.mean_generated, row.mean_retrieved);
  return buf;
}

}  // namespace relshot::eval
