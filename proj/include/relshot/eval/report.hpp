#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "relshot/embed/vector_index.hpp"
#include "relshot/eval/score.hpp"
#include "relshot/select/trace.hpp"

namespace relshot::eval {

/// Scores of one run directory, micro per episode file and aggregated
/// across files. Failed episodes are counted but not scored.
struct RunScores {
  std::string dir;
  std::string strategy;
  int shots = 1;
  std::string ner;
  std::string inference_mode;
  std::vector<std::string> files;  // scored files, aligned with aggregate.files
  FileAggregate aggregate;
  std::size_t episodes = 0;
  std::size_t failed = 0;
};

/// Throws MissingArtifacts when manifest.jsonl or results.jsonl is absent.
RunScores load_run(const std::string& run_dir);

/// Reads traces.jsonl. Throws MissingArtifacts when absent.
std::vector<select::SelectionTrace> load_traces(const std::string& run_dir);

/// {strategy, shots, P_mean, P_std, R_mean, R_std, F1_mean, F1_std, ...}
nlohmann::json report_record(const RunScores& run);

/// Fixed-width text table, one row per run.
std::string report_table(std::span<const RunScores> runs);

/// Writes report.jsonl, report.txt and f1_bars.dat (label, shots, F1 mean,
/// F1 std; whitespace separated) into `out_dir`.
std::vector<RunScores> emit_report(const std::vector<std::string>& run_dirs,
                                   const std::string& out_dir);

/// Side-by-side P/R/F1 (mean +- std) of a run with the filter and the same
/// configuration without it, plus the difference.
std::string ablation_table(const RunScores& with_filter, const RunScores& without_filter);

struct DiversityRow {
  std::string strategy;
  int shots = 0;
  std::size_t traces = 0;   // traces that contributed
  std::size_t skipped = 0;  // traces lacking a vector for some sentence
  double gold_overlap_pct = 0.0;
  double gold_cosine = 0.0;
  std::size_t among_traces = 0;
  double among_overlap_pct = 0.0;
  double among_cosine = 0.0;
};

/// Per-relation diversity metrics averaged per (strategy, shots). Vectors
/// for the gold and additional sentences are looked up in `vectors`.
std::vector<DiversityRow> diversity_table(std::span<const select::SelectionTrace> traces,
                                          const embed::SupportVectors& vectors);

std::string format_diversity(std::span<const DiversityRow> rows);

}  // namespace relshot::eval
