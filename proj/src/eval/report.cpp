#include "relshot/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "relshot/core/errors.hpp"
#include "relshot/pipeline/runner.hpp"
#include "relshot/select/diversity.hpp"

namespace relshot::eval {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<json> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifacts("missing " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw SchemaError(path.string(), n, e.what());
    }
  }
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pm(const MeanStd& m) { return fmt("%.1f", m.mean) + " +- " + fmt("%.2f", m.std); }

std::string shots_label(int shots) { return "1+" + std::to_string(shots - 1); }

}  // namespace

RunScores load_run(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const auto manifest = read_lines(dir / "manifest.jsonl");
  if (manifest.empty()) throw MissingArtifacts("empty manifest in " + run_dir);
  const auto results = read_lines(dir / "results.jsonl");

  RunScores run;
  run.dir = run_dir;
  const auto& cfg = manifest.front().at("config");
  run.strategy = cfg.at("strategy").at("label").get<std::string>();
  run.shots = cfg.at("strategy").at("shots").get<int>();
  run.ner = cfg.value("ner", "");
  run.inference_mode = cfg.value("inference_mode", "");

  std::vector<std::string> order = manifest.front().value("files", std::vector<std::string>{});
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> labels;
  for (const auto& j : results) {
    const auto r = pipeline::episode_result_from_json(j);
    ++run.episodes;
    if (std::find(order.begin(), order.end(), r.file) == order.end()) order.push_back(r.file);
    if (r.failed) {
      ++run.failed;
      continue;
    }
    auto& [gold, pred] = labels[r.file];
    for (const auto& q : r.queries) {
      gold.push_back(q.gold_label);
      pred.push_back(q.predicted);
    }
  }
  std::vector<ScoreReport> reports;
  for (const auto& f : order) {
    auto it = labels.find(f);
    if (it == labels.end()) continue;
    reports.push_back(score(it->second.first, it->second.second));
    run.files.push_back(f);
  }
  if (reports.empty()) reports.push_back(ScoreReport{});
  run.aggregate = aggregate_files(std::move(reports));
  return run;
}

std::vector<select::SelectionTrace> load_traces(const std::string& run_dir) {
  std::vector<select::SelectionTrace> out;
  for (const auto& j : read_lines(fs::path(run_dir) / "traces.jsonl")) {
    out.push_back(select::trace_from_json(j));
  }
  return out;
}

json report_record(const RunScores& run) {
  const auto& a = run.aggregate;
  json per_file = json::array();
  for (std::size_t i = 0; i < a.files.size() && i < run.files.size(); ++i) {
    auto j = to_json(a.files[i]);
    j["file"] = run.files[i];
    per_file.push_back(std::move(j));
  }
  json j{{"strategy", run.strategy},
         {"shots", run.shots},
         {"P_mean", a.precision.mean},
         {"P_std", a.precision.std},
         {"R_mean", a.recall.mean},
         {"R_std", a.recall.std},
         {"F1_mean", a.f1.mean},
         {"F1_std", a.f1.std},
         {"ner", run.ner},
         {"inference_mode", run.inference_mode},
         {"episodes", run.episodes},
         {"failed_episodes", run.failed},
         {"files", per_file},
         {"run", run.dir}};
  if (a.single_file) j["single_file"] = true;
  return j;
}

std::string report_table(std::span<const RunScores> runs) {
  std::size_t w = 8;
  for (const auto& r : runs) w = std::max(w, r.strategy.size());
  std::string out = pad("strategy", w) + "  #ex    " + pad("P", 14) + pad("R", 14) +
                    pad("F1", 14) + "failed\n";
  for (const auto& r : runs) {
    const auto& a = r.aggregate;
    out += pad(r.strategy, w) + "  " + pad(shots_label(r.shots), 7) +
           pad(pm(a.precision), 14) + pad(pm(a.recall), 14) + pad(pm(a.f1), 14) +
           std::to_string(r.failed) + "/" + std::to_string(r.episodes);
    if (a.single_file) out += "  (single file, std not measured)";
    out += '\n';
  }
  return out;
}

std::vector<RunScores> emit_report(const std::vector<std::string>& run_dirs,
                                   const std::string& out_dir) {
  if (run_dirs.empty()) throw MissingArtifacts("no run directories given");
  std::vector<RunScores> runs;
  for (const auto& d : run_dirs) runs.push_back(load_run(d));

  fs::create_directories(out_dir);
  std::ofstream jl(fs::path(out_dir) / "report.jsonl", std::ios::binary | std::ios::trunc);
  std::ofstream bars(fs::path(out_dir) / "f1_bars.dat", std::ios::binary | std::ios::trunc);
  bars << "# strategy shots f1_mean f1_std\n";
  for (const auto& r : runs) {
    jl << report_record(r).dump() << '\n';
    bars << r.strategy << ' ' << r.shots << ' ' << fmt("%.4f", r.aggregate.f1.mean) << ' '
         << fmt("%.4f", r.aggregate.f1.std) << '\n';
  }
  std::ofstream txt(fs::path(out_dir) / "report.txt", std::ios::binary | std::ios::trunc);
  txt << report_table(runs);
  return runs;
}

std::string ablation_table(const RunScores& with_filter, const RunScores& without_filter) {
  const std::string base = with_filter.strategy + " (ner " + with_filter.ner + ")";
  const std::size_t w = std::max<std::size_t>(24, base.size() + 2);
  const auto row = [w](const std::string& label, const RunScores& r) {
    const auto& a = r.aggregate;
    return pad(label, w) + pad(shots_label(r.shots), 7) + pad(pm(a.precision), 14) +
           pad(pm(a.recall), 14) + pm(a.f1) + '\n';
  };
  const auto delta = [](double a, double b) { return fmt("%+.1f", a - b); };
  const auto& f = with_filter.aggregate;
  const auto& nf = without_filter.aggregate;
  std::string out = pad("", w) + "#ex    " + pad("P", 14) + pad("R", 14) + "F1\n";
  out += row(base, with_filter);
  out += row("  without NER filter", without_filter);
  out += pad("  difference", w + 7) + pad(delta(nf.precision.mean, f.precision.mean), 14) +
         pad(delta(nf.recall.mean, f.recall.mean), 14) + delta(nf.f1.mean, f.f1.mean) + '\n';
  return out;
}

std::vector<DiversityRow> diversity_table(std::span<const select::SelectionTrace> traces,
                                          const embed::SupportVectors& vectors) {
  std::map<std::pair<std::string, int>, DiversityRow> groups;
  const auto item = [&](const std::string& text) -> std::optional<select::DiversityItem> {
    auto s = parse_tagged(text);
    auto v = vectors.find(s);
    if (!v) return std::nullopt;
    return select::DiversityItem{std::move(s), std::vector<float>(v->begin(), v->end())};
  };
  for (const auto& t : traces) {
    auto& row = groups[{t.strategy, t.shots}];
    row.strategy = t.strategy;
    row.shots = t.shots;
    if (t.chosen.empty() || t.gold.empty()) continue;
    auto gold = item(t.gold);
    std::vector<select::DiversityItem> extra;
    bool complete = gold.has_value();
    for (const auto& c : t.chosen) {
      if (!complete) break;
      auto it = item(c.text);
      if (!it) complete = false;
      else extra.push_back(std::move(*it));
    }
    if (!complete) {
      ++row.skipped;
      continue;
    }
    const auto rep = select::diversity_report(extra, *gold);
    ++row.traces;
    row.gold_overlap_pct += rep.gold_vs_additional.overlap_pct;
    row.gold_cosine += rep.gold_vs_additional.cosine;
    if (rep.among_additional) {
      ++row.among_traces;
      row.among_overlap_pct += rep.among_additional->overlap_pct;
      row.among_cosine += rep.among_additional->cosine;
    }
  }
  std::vector<DiversityRow> out;
  for (auto& [key, row] : groups) {
    if (row.traces) {
      row.gold_overlap_pct /= static_cast<double>(row.traces);
      row.gold_cosine /= static_cast<double>(row.traces);
    }
    if (row.among_traces) {
      row.among_overlap_pct /= static_cast<double>(row.among_traces);
      row.among_cosine /= static_cast<double>(row.among_traces);
    }
    out.push_back(row);
  }
  return out;
}

std::string format_diversity(std::span<const DiversityRow> rows) {
  std::size_t w = 8;
  for (const auto& r : rows) w = std::max(w, r.strategy.size());
  std::string out = pad("strategy", w) + "  #ex    gold%   gold-cos  among%  among-cos  traces\n";
  for (const auto& r : rows) {
    out += pad(r.strategy, w) + "  " + pad(shots_label(r.shots), 7) +
           lpad(r.traces ? fmt("%.1f", r.gold_overlap_pct) : "-", 5) + "   " +
           lpad(r.traces ? fmt("%.3f", r.gold_cosine) : "-", 8) + "  " +
           lpad(r.among_traces ? fmt("%.1f", r.among_overlap_pct) : "-", 6) + "  " +
           lpad(r.among_traces ? fmt("%.3f", r.among_cosine) : "-", 9) + "  " +
           std::to_string(r.traces);
    if (r.skipped) out += " (" + std::to_string(r.skipped) + " skipped)";
    out += '\n';
  }
  return out;
}

}  // namespace relshot::eval
