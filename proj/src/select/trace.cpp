#include "relshot/select/trace.hpp"

namespace relshot::select {

nlohmann::json to_json(const SelectionTrace& t) {
  nlohmann::json chosen = nlohmann::json::array();
  for (const auto& c : t.chosen) {
    chosen.push_back({{"pool_id", c.pool_id}, {"provenance", c.provenance}, {"text", c.text}});
  }
  nlohmann::json j = {{"episode_id", t.episode_id}, {"relation", t.relation},
                      {"strategy", t.strategy},     {"shots", t.shots},
                      {"gold", t.gold},             {"chosen", chosen},
                      {"pool_n", t.pool_n},         {"k", t.k}};
  if (!t.flags.empty()) j["flags"] = t.flags;
  return j;
}

SelectionTrace trace_from_json(const nlohmann::json& j) {
  SelectionTrace t;
  t.episode_id = j.at("episode_id").get<std::string>();
  t.relation = j.at("relation").get<std::string>();
  t.strategy = j.at("strategy").get<std::string>();
  t.shots = j.value("shots", static_cast<int>(j.at("chosen").size()) + 1);
  t.gold = j.value("gold", "");
  for (const auto& c : j.at("chosen")) {
    t.chosen.push_back({c.at("pool_id").get<int>(), c.at("provenance").get<std::string>(),
                        c.at("text").get<std::string>()});
  }
  t.pool_n = j.at("pool_n").get<std::size_t>();
  t.k = j.at("k").get<std::size_t>();
  if (j.contains("flags")) t.flags = j["flags"].get<std::vector<std::string>>();
  return t;
}

}  // namespace relshot::select
