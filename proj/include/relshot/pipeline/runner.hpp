#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relshot/core/episode.hpp"
#include "relshot/llm/gateway.hpp"
#include "relshot/pipeline/config.hpp"
#include "relshot/select/trace.hpp"

namespace relshot::pipeline {

struct DecisionRecord {
  std::string relation;
  bool yes = false;
  llm::DecisionMethod method = llm::DecisionMethod::kTextFallback;
  std::optional<double> score_yes;
  std::optional<double> score_no;
  int attempts = 1;
};

struct QueryResult {
  std::size_t index = 0;
  std::string gold_label;
  std::string predicted;
  std::vector<std::string> surviving;
  std::vector<DecisionRecord> decisions;  // binary mode, in relation order
  bool malformed_answer = false;          // multi-class mode
};

struct EpisodeResult {
  std::string file;
  std::size_t line = 0;
  std::string episode_id;
  bool failed = false;
  std::string error;
  std::vector<QueryResult> queries;
  std::vector<select::SelectionTrace> traces;  // relations whose support was built
};

nlohmann::json to_json(const EpisodeResult& r);
EpisodeResult episode_result_from_json(const nlohmann::json& j);

/// Runs one episode: filter, build (and cache) supports for the relations
/// that are actually prompted, infer, aggregate. Gateway failures throw.
EpisodeResult process_episode(const Episode& episode, const RunConfig& config,
                              const Stores& stores, llm::Gateway* gateway);

struct RunSummary {
  std::size_t episodes = 0;
  std::size_t failed = 0;
  std::size_t queries = 0;
  std::size_t malformed_answers = 0;
};

/// Processes every episode of `episode_files` and writes manifest.jsonl,
/// results.jsonl, traces.jsonl and run.log into `out_dir`. A record that
/// is not a well-formed episode object throws SchemaError before any
/// inference starts. Episodes that fail later are recorded and skipped.
/// Output is byte-identical for a fixed config and a deterministic gateway,
/// whatever config.parallelism is.
RunSummary run(const RunConfig& config, const std::vector<std::string>& episode_files,
               const Stores& stores, llm::Gateway* gateway, const std::string& out_dir,
               const nlohmann::json& extra_manifest = nlohmann::json::object());

}  // namespace relshot::pipeline
