#include "relshot/pipeline/runner.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "relshot/core/errors.hpp"
#include "relshot/core/random.hpp"
#include "relshot/llm/templates.hpp"
#include "relshot/pipeline/filter.hpp"
#include "relshot/pipeline/inference.hpp"
#include "relshot/pipeline/support_builder.hpp"

namespace relshot::pipeline {

using nlohmann::json;

namespace {

json decision_to_json(const DecisionRecord& d) {
  json j{{"relation", d.relation},
         {"answer", d.yes ? "yes" : "no"},
         {"method", llm::to_string(d.method)},
         {"attempts", d.attempts}};
  if (d.score_yes) j["score_yes"] = *d.score_yes;
  if (d.score_no) j["score_no"] = *d.score_no;
  return j;
}

struct WorkItem {
  std::string file;
  EpisodeRecord record;
};

void write_lines(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) out << r.dump() << '\n';
}

}  // namespace

json to_json(const EpisodeResult& r) {
  json j{{"file", r.file}, {"line", r.line}, {"episode_id", r.episode_id},
         {"status", r.failed ? "failed" : "ok"}};
  if (r.failed) {
    j["error"] = r.error;
    return j;
  }
  json queries = json::array();
  for (const auto& q : r.queries) {
    json d = json::array();
    for (const auto& x : q.decisions) d.push_back(decision_to_json(x));
    json jq{{"index", q.index},         {"gold", q.gold_label}, {"predicted", q.predicted},
            {"surviving", q.surviving}, {"decisions", d}};
    if (q.malformed_answer) jq["malformed_answer"] = true;
    queries.push_back(std::move(jq));
  }
  j["queries"] = std::move(queries);
  return j;
}

EpisodeResult episode_result_from_json(const json& j) {
  EpisodeResult r;
  r.file = j.value("file", "");
  r.line = j.value("line", std::size_t{0});
  r.episode_id = j.at("episode_id").get<std::string>();
  r.failed = j.at("status").get<std::string>() == "failed";
  if (r.failed) {
    r.error = j.value("error", "");
    return r;
  }
  for (const auto& jq : j.at("queries")) {
    QueryResult q;
    q.index = jq.at("index").get<std::size_t>();
    q.gold_label = jq.at("gold").get<std::string>();
    q.predicted = jq.at("predicted").get<std::string>();
    q.surviving = jq.at("surviving").get<std::vector<std::string>>();
    q.malformed_answer = jq.value("malformed_answer", false);
    for (const auto& jd : jq.at("decisions")) {
      DecisionRecord d;
      d.relation = jd.at("relation").get<std::string>();
      d.yes = jd.at("answer").get<std::string>() == "yes";
      d.method = jd.at("method").get<std::string>() == "logit"
                     ? llm::DecisionMethod::kLogit
                     : llm::DecisionMethod::kTextFallback;
      d.attempts = jd.value("attempts", 1);
      if (jd.contains("score_yes")) d.score_yes = jd["score_yes"].get<double>();
      if (jd.contains("score_no")) d.score_no = jd["score_no"].get<double>();
      q.decisions.push_back(std::move(d));
    }
    r.queries.push_back(std::move(q));
  }
  return r;
}

EpisodeResult process_episode(const Episode& episode, const RunConfig& config,
                              const Stores& stores, llm::Gateway* gateway) {
  EpisodeResult out;
  out.episode_id = episode.episode_id;
  const SeedPath episode_seed = SeedPath(config.seed).then(episode.episode_id);

  std::map<std::size_t, SupportSet> cache;
  const auto support_for = [&](std::size_t r) -> const std::vector<TaggedSentence>& {
    auto it = cache.find(r);
    if (it == cache.end()) {
      it = cache.emplace(r, build_support(episode.episode_id, episode.relations[r], config,
                                          stores, gateway,
                                          episode_seed.then("relation").then(
                                              static_cast<std::uint64_t>(r)).value()))
               .first;
    }
    return it->second.shots;
  };
  const auto need_gateway = [&]() -> llm::Gateway& {
    if (!gateway) throw InvalidConfig("inference needs a gateway");
    return *gateway;
  };

  for (std::size_t qi = 0; qi < episode.queries.size(); ++qi) {
    const Query& query = episode.queries[qi];
    const std::string qid = episode.episode_id + "/q" + std::to_string(qi);
    QueryResult qr;
    qr.index = qi;
    qr.gold_label = query.gold_label;

    if (config.inference_mode == InferenceMode::kMultiClass) {
      std::vector<std::vector<TaggedSentence>> supports;
      for (std::size_t r = 0; r < episode.relations.size(); ++r) {
        supports.push_back(support_for(r));
        qr.surviving.push_back(episode.relations[r].spec.name);
      }
      auto m = infer_multiclass(episode, query.sentence, supports, need_gateway(),
                                qid + "/multi");
      qr.predicted = m.label.value();
      qr.malformed_answer = m.malformed;
    } else {
      const auto surviving =
          filter_relations(episode, query, config.ner, gateway, qid + "/ner");
      std::vector<RelationDecision> decisions;
      for (std::size_t r : surviving) {
        const auto& spec = episode.relations[r].spec;
        qr.surviving.push_back(spec.name);
        const auto d = infer_binary(query.sentence, spec, support_for(r), need_gateway(),
                                    qid + "/" + spec.name);
        decisions.push_back({r, d.yes()});
        qr.decisions.push_back({spec.name, d.yes(), d.method, d.score_yes, d.score_no,
                                d.attempts});
      }
      qr.predicted = aggregate(episode, decisions, config.seed, episode.episode_id, qi).value();
    }
    out.queries.push_back(std::move(qr));
  }
  for (auto& [r, s] : cache) out.traces.push_back(std::move(s.trace));
  return out;
}

RunSummary run(const RunConfig& config, const std::vector<std::string>& episode_files,
               const Stores& stores, llm::Gateway* gateway, const std::string& out_dir,
               const json& extra_manifest) {
  config.validate();
  if (config.strategy.needs_store() && (!stores.candidates || !stores.supports)) {
    throw InvalidConfig("strategy '" + config.strategy.label() + "' needs embedding stores");
  }

  // Schema pre-pass: nothing is sent to the gateway if any file is unreadable.
  std::vector<WorkItem> items;
  for (const auto& file : episode_files) {
    EpisodeReader reader(file);
    try {
      while (auto rec = reader.next()) items.push_back({file, std::move(*rec)});
    } catch (const SchemaError& e) {
      throw SchemaError(file, e.line(), e.detail());
    }
  }

  std::vector<EpisodeResult> results(items.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const auto& item = items[i];
      EpisodeResult r;
      if (!item.record.episode) {
        r.failed = true;
        r.error = item.record.error;
      } else {
        try {
          r = process_episode(*item.record.episode, config, stores, gateway);
        } catch (const std::exception& e) {
          r = EpisodeResult{};
          r.failed = true;
          r.error = e.what();
        }
      }
      r.file = item.file;
      r.line = item.record.line;
      r.episode_id = item.record.episode_id;
      results[i] = std::move(r);
    }
  };
  const int workers =
      std::max(1, std::min<int>(config.parallelism, static_cast<int>(items.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunSummary summary;
  std::vector<json> result_lines, trace_lines;
  std::vector<std::string> log;
  if (config.inference_mode == InferenceMode::kMultiClass) {
    log.push_back(
        "note: the multi-relation template asks for yes/no; replies are matched against "
        "relation names and anything else counts as no_relation");
  }
  for (const auto& r : results) {
    ++summary.episodes;
    result_lines.push_back(to_json(r));
    if (r.failed) {
      ++summary.failed;
      log.push_back("episode " + r.episode_id + " (" + r.file + ":" + std::to_string(r.line) +
                    ") failed: " + r.error);
      continue;
    }
    for (const auto& q : r.queries) {
      ++summary.queries;
      if (q.malformed_answer) {
        ++summary.malformed_answers;
        log.push_back("episode " + r.episode_id + " query " + std::to_string(q.index) +
                      ": reply names no candidate relation");
      }
    }
    for (const auto& t : r.traces) {
      trace_lines.push_back(select::to_json(t));
      for (const auto& f : t.flags) {
        log.push_back("episode " + r.episode_id + " relation " + t.relation + ": " + f);
      }
    }
  }

  json templates = json::object();
  for (auto id : llm::kAllTemplates) {
    templates[llm::to_string(id)] = llm::hex64(llm::template_hash(id));
  }
  json counters{{"episodes", summary.episodes},
                {"failed", summary.failed},
                {"queries", summary.queries},
                {"malformed_answers", summary.malformed_answers}};
  if (gateway) {
    const auto s = gateway->stats();
    counters["requests"] = s.requests;
    counters["retries"] = s.retries;
    counters["summarize_fallbacks"] = s.summarize_fallbacks;
    counters["pick_fallbacks"] = s.pick_fallbacks;
    counters["text_fallback_decisions"] = s.text_fallback_decisions;
  }
  json manifest{{"config", to_json(config)},
                {"files", episode_files},
                {"templates", templates},
                {"counters", counters}};
  for (const auto& [k, v] : extra_manifest.items()) manifest[k] = v;

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_lines(dir / "manifest.jsonl", {manifest});
  write_lines(dir / "results.jsonl", result_lines);
  write_lines(dir / "traces.jsonl", trace_lines);
  std::ofstream log_out(dir / "run.log", std::ios::binary | std::ios::trunc);
  for (const auto& l : log) log_out << l << '\n';
  return summary;
}

}  // namespace relshot::pipeline
