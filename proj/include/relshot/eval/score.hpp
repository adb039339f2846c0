#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace relshot::eval {

/// Micro scores over one prediction file, no_relation excluded. P, R and F1
/// are percentages at full precision; round only for display.
struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positive = 0;
  std::size_t predicted_positive = 0;
  std::size_t gold_positive = 0;
  std::size_t n_queries = 0;
};

/// 2PR/(P+R), 0 when P+R is 0.
double f1(double precision, double recall);

/// Throws LengthMismatch when the lists differ in length.
ScoreReport score(std::span<const std::string> gold, std::span<const std::string> pred);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n-1); 0 for a single value
};

MeanStd mean_std(std::span<const double> values);

struct FileAggregate {
  std::vector<ScoreReport> files;
  MeanStd precision;
  MeanStd recall;
  MeanStd f1;
  bool single_file = false;  // std is 0 by convention, not measured
};

/// Throws EmptyInput for an empty list.
FileAggregate aggregate_files(std::vector<ScoreReport> reports);

nlohmann::json to_json(const ScoreReport& r);

}  // namespace relshot::eval
