#include "relshot/eval/score.hpp"

#include <cmath>

#include "relshot/core/episode.hpp"
#include "relshot/core/errors.hpp"

namespace relshot::eval {

double f1(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

ScoreReport score(std::span<const std::string> gold, std::span<const std::string> pred) {
  if (gold.size() != pred.size()) {
    throw LengthMismatch("score: " + std::to_string(gold.size()) + " gold labels vs " +
                         std::to_string(pred.size()) + " predictions");
  }
  ScoreReport r;
  r.n_queries = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool gold_pos = gold[i] != kNoRelation;
    const bool pred_pos = pred[i] != kNoRelation;
    r.gold_positive += gold_pos;
    r.predicted_positive += pred_pos;
    r.true_positive += pred_pos && pred[i] == gold[i];
  }
  if (r.predicted_positive) {
    r.precision = 100.0 * static_cast<double>(r.true_positive) /
                  static_cast<double>(r.predicted_positive);
  }
  if (r.gold_positive) {
    r.recall =
        100.0 * static_cast<double>(r.true_positive) / static_cast<double>(r.gold_positive);
  }
  r.f1 = f1(r.precision, r.recall);
  return r;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

FileAggregate aggregate_files(std::vector<ScoreReport> reports) {
  if (reports.empty()) throw EmptyInput("aggregate_files: no reports");
  FileAggregate a;
  std::vector<double> p, r, f;
  for (const auto& x : reports) {
    p.push_back(x.precision);
    r.push_back(x.recall);
    f.push_back(x.f1);
  }
  a.precision = mean_std(p);
  a.recall = mean_std(r);
  a.f1 = mean_std(f);
  a.single_file = reports.size() == 1;
  a.files = std::move(reports);
  return a;
}

nlohmann::json to_json(const ScoreReport& r) {
  return {{"P", r.precision},
          {"R", r.recall},
          {"F1", r.f1},
          {"tp", r.true_positive},
          {"pp", r.predicted_positive},
          {"gp", r.gold_positive},
          {"n", r.n_queries}};
}

}  // namespace relshot::eval
