#pragma once

#include <span>
#include <string>
#include <vector>

#include "relshot/select/trace.hpp"

namespace relshot::eval {

struct PickCount {
  std::size_t generated = 0;
  std::size_t retrieved = 0;
};

PickCount count_picks(const select::SelectionTrace& trace);

struct ProvenanceRow {
  std::string strategy;
  int shots = 0;
  std::size_t traces = 0;
  double mean_generated = 0.0;
  double mean_retrieved = 0.0;
};

/// Mean picks per relation, grouped by (strategy, shots) in sorted key order.
std::vector<ProvenanceRow> pick_provenance(std::span<const select::SelectionTrace> traces);

/// "3.05/0.95"
std::string format_provenance(const ProvenanceRow& row);

}  // namespace relshot::eval
