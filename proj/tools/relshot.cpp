// relshot: K-shot relation extraction runs, scoring and analysis.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "relshot/core/errors.hpp"
#include "relshot/embed/embedding_io.hpp"
#include "relshot/eval/provenance.hpp"
#include "relshot/eval/report.hpp"
#include "relshot/llm/http_transport.hpp"
#include "relshot/llm/mock_transport.hpp"
#include "relshot/pipeline/runner.hpp"

namespace {

using namespace relshot;

struct RunArgs {
  std::vector<std::string> episodes;
  std::string strategy = "gold-only";
  int shots = 1;
  double tau = pipeline::kDefaultTau;
  std::string representation = "rule";
  std::string cluster;
  std::string policy;
  bool hybrid = false;
  bool summarize = false;
  std::string ner = "deterministic-then-llm";
  std::string mode = "binary";
  std::string endpoint;
  std::string model = "Qwen/Qwen3-4B";
  std::string api_key;
  std::string mock;
  std::string decoding = "qwen";
  std::string store;
  std::string sidecar;
  std::string support_store;
  std::uint64_t seed = 0;
  int parallel = 1;
  std::string out = "run";
};

int do_run(const RunArgs& a) {
  pipeline::RunConfig cfg;
  auto& s = cfg.strategy;
  s.kind = a.hybrid ? select::StrategyKind::kHybrid
                    : select::strategy_kind_from_string(a.strategy);
  s.representation = select::representation_from_string(a.representation);
  if (!a.cluster.empty()) s.clustering = select::clustering_from_string(a.cluster);
  if (!a.policy.empty()) s.policy = select::cluster_policy_from_string(a.policy);
  s.shots_k = a.shots;
  s.summarize = a.summarize;
  s.seed = a.seed;
  cfg.tau = a.tau;
  cfg.inference_mode = pipeline::inference_mode_from_string(a.mode);
  cfg.ner = pipeline::ner_mode_from_string(a.ner);
  cfg.decoding = llm::DecodingProfile::preset(a.decoding);
  cfg.seed = a.seed;
  cfg.parallelism = a.parallel;
  cfg.validate();

  std::optional<embed::VectorIndex> index;
  std::optional<embed::SupportVectors> supports;
  pipeline::Stores stores;
  if (s.needs_store()) {
    if (a.store.empty() || a.support_store.empty()) {
      throw InvalidConfig("strategy '" + s.label() + "' needs --store and --support-store");
    }
    auto records = embed::read_embedding_file(
        a.store, a.sidecar.empty() ? std::nullopt : std::optional<std::string>(a.sidecar));
    const bool want_rule = s.representation == select::Representation::kRule;
    std::size_t mismatched = 0;
    for (const auto& r : records) {
      mismatched += want_rule == (r.source == embed::VectorSource::kSentence);
    }
    if (mismatched) {
      std::cerr << "warning: " << mismatched << " store records are not "
                << (want_rule ? "rule" : "sentence") << " embeddings\n";
    }
    index = embed::VectorIndex::build(std::move(records));
    supports = embed::SupportVectors::build(embed::read_embedding_file(a.support_store));
    stores = {&*index, &*supports};
  }

  std::shared_ptr<llm::ChatTransport> transport;
  if (!a.mock.empty()) {
    transport = std::make_shared<llm::MockTransport>(llm::MockTransport::rules_from_file(a.mock));
  } else if (!a.endpoint.empty()) {
    llm::HttpConfig http;
    http.endpoint = a.endpoint;
    http.api_key = a.api_key;
    if (http.api_key.empty()) {
      if (const char* k = std::getenv("RELSHOT_API_KEY")) http.api_key = k;
    }
    transport = std::make_shared<llm::HttpTransport>(http);
  }
  std::optional<llm::Gateway> gateway;
  if (transport) {
    llm::GatewayConfig gc;
    gc.model = a.mock.empty() ? a.model : "mock";
    gc.generation = cfg.decoding;
    gc.max_in_flight = std::max(1, a.parallel) * 2;
    if (!a.mock.empty()) gc.sleep = [](std::chrono::milliseconds) {};
    gateway.emplace(transport, gc);
  }

  nlohmann::json extra{{"model", a.mock.empty() ? a.model : "mock"}};
  if (!a.mock.empty()) extra["mock"] = a.mock;
  if (!a.store.empty()) extra["store"] = a.store;
  const auto summary =
      pipeline::run(cfg, a.episodes, stores, gateway ? &*gateway : nullptr, a.out, extra);
  std::cout << "episodes " << summary.episodes << ", failed " << summary.failed
            << ", queries " << summary.queries << " -> " << a.out << '\n';
  return 0;
}

int do_score(const std::vector<std::string>& runs, const std::string& out) {
  if (out.empty()) {
    std::vector<eval::RunScores> scores;
    for (const auto& r : runs) scores.push_back(eval::load_run(r));
    for (const auto& s : scores) std::cout << eval::report_record(s).dump() << '\n';
    std::cout << eval::report_table(scores);
    return 0;
  }
  std::cout << eval::report_table(eval::emit_report(runs, out));
  return 0;
}

int do_provenance(const std::vector<std::string>& runs) {
  std::vector<select::SelectionTrace> traces;
  for (const auto& r : runs) {
    auto t = eval::load_traces(r);
    traces.insert(traces.end(), t.begin(), t.end());
  }
  std::cout << "strategy\tshots\trelations\tgenerated/retrieved\n";
  for (const auto& row : eval::pick_provenance(traces)) {
    std::cout << row.strategy << '\t' << row.shots << '\t' << row.traces << '\t'
              << eval::format_provenance(row) << '\n';
  }
  return 0;
}

int do_diversity(const std::vector<std::string>& runs, const std::string& vectors,
                 const std::string& sidecar) {
  const auto sv = embed::SupportVectors::build(embed::read_embedding_file(
      vectors, sidecar.empty() ? std::nullopt : std::optional<std::string>(sidecar)));
  std::vector<select::SelectionTrace> traces;
  for (const auto& r : runs) {
    auto t = eval::load_traces(r);
    traces.insert(traces.end(), t.begin(), t.end());
  }
  std::cout << eval::format_diversity(eval::diversity_table(traces, sv));
  return 0;
}

int do_ablate(const std::string& with_filter, const std::string& without_filter) {
  std::cout << eval::ablation_table(eval::load_run(with_filter), eval::load_run(without_filter));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relshot: K-shot support selection and inference for few-shot relation extraction"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run a strategy over episode files");
  run->add_option("--episodes", ra.episodes, "episode files (JSONL)")->required()->check(CLI::ExistingFile);
  run->add_option("--strategy", ra.strategy,
                  "gold-only|llm-paraphrase|llm-generate|retrieve-closest|retrieve-cluster|hybrid")
      ->capture_default_str();
  run->add_option("--shots", ra.shots, "K, gold included (1, 5 or 10)")->capture_default_str();
  run->add_option("--tau", ra.tau, "similarity threshold for the cluster pool")->capture_default_str();
  run->add_option("--representation", ra.representation, "sentence|rule")->capture_default_str();
  run->add_option("--cluster", ra.cluster, "kmeans|kmeans++");
  run->add_option("--policy", ra.policy, "random|closest|farthest");
  run->add_flag("--hybrid", ra.hybrid, "same as --strategy hybrid");
  run->add_flag("--summarize", ra.summarize, "replace additional examples by summaries");
  run->add_option("--ner", ra.ner, "off|deterministic|llm|deterministic-then-llm")->capture_default_str();
  run->add_option("--mode", ra.mode, "binary|multi-class")->capture_default_str();
  run->add_option("--endpoint", ra.endpoint, "chat-completions URL");
  run->add_option("--model", ra.model, "model name sent to the endpoint")->capture_default_str();
  run->add_option("--api-key", ra.api_key, "bearer token (default: $RELSHOT_API_KEY)");
  run->add_option("--mock", ra.mock, "scripted reply fixture instead of an endpoint")
      ->check(CLI::ExistingFile);
  run->add_option("--decoding", ra.decoding, "qwen|gemma|greedy")->capture_default_str();
  run->add_option("--store", ra.store, "candidate embedding file (JSONL)")->check(CLI::ExistingFile);
  run->add_option("--sidecar", ra.sidecar, "binary vectors for --store")->check(CLI::ExistingFile);
  run->add_option("--support-store", ra.support_store, "gold support embedding file (JSONL)")
      ->check(CLI::ExistingFile);
  run->add_option("--seed", ra.seed, "run seed")->capture_default_str();
  run->add_option("--parallel", ra.parallel, "episode workers")->capture_default_str();
  run->add_option("--out", ra.out, "output directory")->capture_default_str();

  std::vector<std::string> score_runs;
  std::string score_out;
  auto* score = app.add_subcommand("score", "score run directories");
  score->add_option("runs", score_runs, "run directories")->required();
  score->add_option("--out", score_out, "write report.jsonl, report.txt and f1_bars.dat here");

  std::vector<std::string> div_runs;
  std::string div_vectors, div_sidecar;
  auto* diversity = app.add_subcommand("diversity", "token overlap and cosine of chosen examples");
  diversity->add_option("runs", div_runs, "run directories")->required();
  diversity->add_option("--vectors", div_vectors, "embeddings of gold and chosen sentences")
      ->required()
      ->check(CLI::ExistingFile);
  diversity->add_option("--sidecar", div_sidecar, "binary vectors for --vectors");

  std::vector<std::string> prov_runs;
  auto* provenance = app.add_subcommand("provenance", "generated/retrieved split of hybrid picks");
  provenance->add_option("runs", prov_runs, "run directories")->required();

  std::string with_filter, without_filter;
  auto* ablate = app.add_subcommand("ablate", "compare a run with and without the NER filter");
  ablate->add_option("with", with_filter, "run with the filter")->required();
  ablate->add_option("without", without_filter, "same run with --ner off")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(ra);
    if (*score) return do_score(score_runs, score_out);
    if (*diversity) return do_diversity(div_runs, div_vectors, div_sidecar);
    if (*provenance) return do_provenance(prov_runs);
    if (*ablate) return do_ablate(with_filter, without_filter);
  } catch (const relshot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
