#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace relshot::select {

struct TraceEntry {
  int pool_id = 0;
  std::string provenance;  // "generated" or "retrieved"
  std::string text;        // tagged
};

/// One line of traces.jsonl: what build_support chose for a relation.
struct SelectionTrace {
  std::string episode_id;
  std::string relation;
  std::string strategy;
  int shots = 1;
  std::string gold;                // tagged gold support
  std::vector<TraceEntry> chosen;  // additional examples only, in prompt order
  std::size_t pool_n = 0;          // candidate pool size
  std::size_t k = 0;               // clusters formed (0 when not clustering)
  std::vector<std::string> flags;  // e.g. "pool-starvation", "pick-fallback"
};

nlohmann::json to_json(const SelectionTrace& t);
SelectionTrace trace_from_json(const nlohmann::json& j);

}  // namespace relshot::select
