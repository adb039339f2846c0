#include <cmath>

#include "doctest.h"
#include "relshot/core/errors.hpp"
#include "relshot/eval/provenance.hpp"
#include "relshot/eval/report.hpp"
#include "relshot/eval/score.hpp"
#include "synthetic.hpp"

using namespace relshot;
using namespace relshot::eval;
using nlohmann::json;

namespace {

using Labels = std::vector<std::string>;

json query_json(std::size_t i, const std::string& gold, const std::string& pred) {
  return {{"index", i}, {"gold", gold}, {"predicted", pred},
          {"surviving", json::array()}, {"decisions", json::array()}};
}

/// Writes a run directory holding one ok episode per (file, gold, pred) entry.
void write_run(const std::filesystem::path& dir, const std::string& label, int shots,
               const std::vector<std::tuple<std::string, Labels, Labels>>& files,
               bool with_failure = false) {
  std::filesystem::create_directories(dir);
  json names = json::array();
  std::string results;
  int n = 0;
  for (const auto& [file, gold, pred] : files) {
    names.push_back(file);
    json qs = json::array();
    for (std::size_t i = 0; i < gold.size(); ++i) qs.push_back(query_json(i, gold[i], pred[i]));
    results += json{{"file", file}, {"line", 1}, {"episode_id", "e" + std::to_string(n++)},
                    {"status", "ok"}, {"queries", qs}}
                   .dump() +
               "\n";
  }
  if (with_failure) {
    results += json{{"file", std::get<0>(files[0])}, {"line", 2}, {"episode_id", "bad"},
                    {"status", "failed"}, {"error", "boom"}}
                   .dump() +
               "\n";
  }
  const json manifest{{"config",
                       {{"strategy", {{"label", label}, {"shots", shots}}},
                        {"ner", "deterministic"},
                        {"inference_mode", "binary"}}},
                      {"files", names}};
  testing::spit(dir / "manifest.jsonl", manifest.dump() + "\n");
  testing::spit(dir / "results.jsonl", results);
}

select::SelectionTrace trace_with(const std::string& strategy, int shots, int generated,
                                  int retrieved) {
  select::SelectionTrace t;
  t.episode_id = "e";
  t.relation = "r";
  t.strategy = strategy;
  t.shots = shots;
  for (int i = 0; i < generated; ++i) t.chosen.push_back({i + 1, "generated", "g"});
  for (int i = 0; i < retrieved; ++i) t.chosen.push_back({generated + i + 1, "retrieved", "r"});
  return t;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("micro scores exclude no_relation") {
  const Labels gold = {"r1", "no_relation", "r2", "r1"};
  const Labels pred = {"r1", "r1", "no_relation", "r2"};
  const auto s = score(gold, pred);
  CHECK(s.true_positive == 1);
  CHECK(s.predicted_positive == 3);
  CHECK(s.gold_positive == 3);
  CHECK(s.precision == doctest::Approx(100.0 / 3));
  CHECK(s.recall == doctest::Approx(100.0 / 3));
  CHECK(s.f1 == doctest::Approx(100.0 / 3));
  CHECK(s.n_queries == 4);

  const auto none = score(Labels{"r1"}, Labels{"no_relation"});
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK_THROWS_AS(score(Labels{"r1"}, Labels{}), LengthMismatch);
  CHECK(score(Labels{}, Labels{}).f1 == 0.0);
}

TEST_CASE("f1 identity") {
  CHECK(f1(26.4, 28.9) == doctest::Approx(27.594).epsilon(1e-4));
  CHECK(f1(0.0, 0.0) == 0.0);
  CHECK(f1(50.0, 50.0) == 50.0);
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> v = {20.0, 30.0};
  const auto m = mean_std(v);
  CHECK(m.mean == 25.0);
  CHECK(m.std == doctest::Approx(std::sqrt(50.0)));
  CHECK(mean_std(std::vector<double>{4.0}).std == 0.0);
  CHECK_THROWS_AS(aggregate_files({}), EmptyInput);
  const auto one = aggregate_files({ScoreReport{10, 20, 13.3, 1, 1, 1, 1}});
  CHECK(one.single_file);
  CHECK(one.f1.std == 0.0);
}

TEST_CASE("runs are scored per file and aggregated") {
  testing::TempDir tmp;
  write_run(tmp.path() / "a", "gold-only", 1,
            {{"f1.jsonl", {"r1", "no_relation", "r2", "r1"}, {"r1", "r1", "no_relation", "r2"}},
             {"f2.jsonl", {"r1", "r2"}, {"r1", "r2"}}},
            true);
  const auto run = load_run(tmp.file("a"));
  CHECK(run.strategy == "gold-only");
  CHECK(run.episodes == 3);
  CHECK(run.failed == 1);
  REQUIRE(run.files == std::vector<std::string>{"f1.jsonl", "f2.jsonl"});
  CHECK(run.aggregate.f1.mean == doctest::Approx((100.0 / 3 + 100.0) / 2));
  CHECK(run.aggregate.f1.std == doctest::Approx(std::sqrt(2.0) * (100.0 - 100.0 / 3) / 2));
  CHECK_FALSE(run.aggregate.single_file);

  const auto rec = report_record(run);
  CHECK(rec["failed_episodes"] == 1);
  CHECK(rec["files"].size() == 2);

  write_run(tmp.path() / "b", "retrieve-closest/rule", 5,
            {{"f1.jsonl", {"r1", "r2"}, {"r1", "no_relation"}}});
  const auto runs = emit_report({tmp.file("a"), tmp.file("b")}, tmp.file("report"));
  CHECK(runs.size() == 2);
  CHECK(testing::read_jsonl(tmp.file("report") + "/report.jsonl").size() == 2);
  const auto bars = testing::slurp(tmp.file("report") + "/f1_bars.dat");
  CHECK(bars.find("retrieve-closest/rule 5 66.6667 0.0000") != std::string::npos);
  CHECK(testing::slurp(tmp.file("report") + "/report.txt").find("single file") !=
        std::string::npos);

  const auto table = ablation_table(runs[0], runs[1]);
  CHECK(table.find("without NER filter") != std::string::npos);
  CHECK(table.find("difference") != std::string::npos);
}

TEST_CASE("missing artifacts") {
  testing::TempDir tmp;
  CHECK_THROWS_AS(load_run(tmp.file("nothing")), MissingArtifacts);
  CHECK_THROWS_AS(load_traces(tmp.file("nothing")), MissingArtifacts);
  CHECK_THROWS_AS(emit_report({}, tmp.file("out")), MissingArtifacts);
}

TEST_CASE("scores from a mock run") {
  testing::TempDir tmp;
  testing::run_mock(tmp.file("run"), 1);
  const auto run = load_run(tmp.file("run"));
  const auto expected = json::parse(testing::slurp(testing::fixture("e2e_expected.json")));
  REQUIRE(run.aggregate.files.size() == 1);
  const auto& s = run.aggregate.files[0];
  const double tp = expected["tp"], pp = expected["pp"], gp = expected["gp"];
  CHECK(s.precision == doctest::Approx(100.0 * tp / pp));
  CHECK(s.recall == doctest::Approx(100.0 * tp / gp));
  CHECK(run.aggregate.single_file);
  CHECK(run.strategy == "gold-only");
}

TEST_CASE("pick provenance") {
  const std::vector<select::SelectionTrace> traces = {
      trace_with("hybrid/rule", 5, 3, 1), trace_with("hybrid/rule", 5, 3, 1),
      trace_with("hybrid/rule", 10, 7, 2), trace_with("hybrid/rule", 10, 6, 3)};
  const auto c = count_picks(traces[0]);
  CHECK(c.generated == 3);
  CHECK(c.retrieved == 1);
  const auto rows = pick_provenance(traces);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].shots == 5);
  CHECK(rows[0].traces == 2);
  CHECK(format_provenance(rows[0]) == "3.00/1.00");
  CHECK(format_provenance(rows[1]) == "6.50/2.50");
  CHECK(format_provenance({"x", 5, 1, 3.05, 0.95}) == "3.05/0.95");
}

TEST_CASE("diversity table skips traces without vectors") {
  using embed::EmbeddingRecord;
  const auto sent = [](const std::string& s, const std::string& o) {
    return parse_tagged("<subject>" + s + "</subject> works at <object>" + o + "</object>");
  };
  const auto rec = [&](embed::RecordId id, const TaggedSentence& s, std::vector<float> v) {
    return EmbeddingRecord{id, s, std::move(v), {"PERSON", "ORGANIZATION"}, std::nullopt,
                           embed::VectorSource::kSentence};
  };
  const auto g = sent("Ann", "Acme");
  const auto a1 = sent("Bob", "Acme");
  const auto a2 = sent("Cy", "Zeta");
  const auto vectors =
      embed::SupportVectors::build({rec(1, g, {1, 0}), rec(2, a1, {0, 1}), rec(3, a2, {0, 1})});
  select::SelectionTrace t;
  t.strategy = "retrieve-closest/rule";
  t.shots = 3;
  t.gold = render_tagged(g);
  t.chosen = {{1, "retrieved", render_tagged(a1)}, {2, "retrieved", render_tagged(a2)}};
  auto missing = t;
  missing.chosen[1].text = render_tagged(sent("Dee", "Nowhere"));
  const std::vector<select::SelectionTrace> traces = {t, missing};
  const auto rows = diversity_table(traces, vectors);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].traces == 1);
  CHECK(rows[0].skipped == 1);
  CHECK(rows[0].gold_cosine == doctest::Approx(0.0));
  CHECK(rows[0].among_cosine == doctest::Approx(1.0));
  CHECK_FALSE(format_diversity(rows).empty());
}

}  // TEST_SUITE
