// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evoheur/errors.hpp"
#include "evoheur/sandbox.hpp"
#include "evoheur/workflow.hpp"

namespace evoheur::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::vector<json> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed record in '" + p.string() + "'", n);
    out.push_back(std::move(j));
  }
  return out;
}

json read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  auto j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("'" + p.string() + "' is not valid JSON");
  return j;
}

std::unique_ptr<agents::LlmBackend> make_backend(const workflow::BackendConfig& b) {
  if (b.kind == "replay") {
    return std::make_unique<agents::ScriptedReplayBackend>(
        agents::ScriptedReplayBackend::from_file(b.fixtures));
  }
  return std::make_unique<agents::HttpChatBackend>(b.http);
}

std::string summary_line(const workflow::RunResult& r, std::uint64_t seed) {
  const auto& l = r.state.ledger;
  return "seed=" + std::to_string(seed) + " best=" + r.best.heuristic.id +
         " gap=" + fmt("%.4f", r.best.loss() * 100.0) + "%" +
         " tokens=" + std::to_string(l.tokens_in() + l.tokens_out()) +
         " queries=" + std::to_string(l.queries()) +
         " generations=" + std::to_string(r.state.generation) +
         " stop=" + r.state.stop_reason;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto a = std::stoull(part.substr(0, dash));
        const auto b = std::stoull(part.substr(dash + 1));
        if (b < a) throw ConfigError("bad seed range '" + part + "'");
        for (auto x = a; x <= b; ++x) out.push_back(x);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed list '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string json_scalar(const json& j) {
  if (j.is_null()) return "";
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

struct RunMetrics {
  std::string dir;
  double best_gap_percent = 0;
  long tokens = 0;
  long queries = 0;
  double wall_seconds = 0;
  int generations = 0;
  bool finished = false;
};

RunMetrics metrics(const fs::path& dir, std::vector<json>* summaries) {
  const auto trace_path = dir / "trace.jsonl";
  if (!fs::exists(trace_path)) throw ConfigError("no trace.jsonl in '" + dir.string() + "'");
  RunMetrics m;
  m.dir = dir.string();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : read_jsonl(trace_path)) {
    const auto type = r.value("type", "");
    if (type == "llm_call") {
      m.tokens += r.value("tokens_in", 0L) + r.value("tokens_out", 0L);
      ++m.queries;
    } else if (type == "generation_summary") {
      best = std::min(best, r.value("best_loss", best));
      m.generations = r.value("generation", 0);
      if (summaries) summaries->push_back(r);
    }
  }
  if (!std::isfinite(best)) throw ConfigError("trace in '" + dir.string() + "' has no generation");
  m.best_gap_percent = best * 100.0;
  if (fs::exists(dir / "result.json")) {
    m.finished = true;
    m.wall_seconds = read_json(dir / "result.json")["timing"].value("wall_seconds", 0.0);
  } else {
    m.wall_seconds =
        read_json(workflow::latest_snapshot(dir))["timing"].value("elapsed_seconds", 0.0);
  }
  return m;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& backend, const std::string& out_dir, std::ostream& out) {
  auto cfg = workflow::load_config(config_path);
  if (!backend.empty()) {
    if (backend == "http") {
      cfg.backend.kind = "http";
    } else if (backend.rfind("replay:", 0) == 0) {
      cfg.backend.kind = "replay";
      cfg.backend.fixtures = fs::absolute(backend.substr(7)).lexically_normal().string();
    } else {
      throw ConfigError("--backend must be http or replay:<fixtures>");
    }
  }
  if (!out_dir.empty()) cfg.out = out_dir;
  cfg.validate();
  const auto seeds = seed ? std::vector<std::uint64_t>{*seed} : cfg.seeds;
  for (auto s : seeds) {
    auto b = make_backend(cfg.backend);
    const fs::path dir = fs::path(cfg.out) / ("seed_" + std::to_string(s));
    workflow::Engine engine(cfg, s, *b, dir);
    engine.initialize();
    const auto r = engine.run();
    out << summary_line(r, s) << "\n";
    out << "wall_seconds=" << fmt("%.2f", r.state.ledger.elapsed_seconds()) << " dir=" << dir.string()
        << "\n";
  }
  return kExitOk;
}

int cmd_resume(const std::string& dir, const std::string& snapshot, std::ostream& out) {
  auto cj = read_json(fs::path(dir) / "config.json");
  if (!cj.contains("seed")) throw ConfigError("config.json has no seed");
  const auto seed = cj["seed"].get<std::uint64_t>();
  cj.erase("seed");
  const auto cfg = workflow::config_from_json(cj, dir);
  auto b = make_backend(cfg.backend);
  workflow::Engine engine(cfg, seed, *b, dir);
  engine.resume(snapshot);
  const auto r = engine.run();
  out << summary_line(r, seed) << "\n";
  out << "wall_seconds=" << fmt("%.2f", r.state.ledger.elapsed_seconds()) << " dir=" << dir << "\n";
  return kExitOk;
}

int cmd_baseline(const std::string& task, const std::string& name, const std::string& manifest,
                 std::ostream& out) {
  const auto kind = tasks::parse_task_kind(task);
  const auto names = tasks::baseline_names(kind);
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown baseline '" + name + "' for " + task);
  }
  const auto instances = workflow::load_manifest(manifest, kind);
  out << "instance,objective,reference,reference_kind,gap_percent\n";
  double sum_gap = 0, sum_obj = 0;
  for (const auto& inst : instances) {
    const auto sol = tasks::run_baseline(kind, name, inst);
    const auto obj = tasks::evaluate_solution(inst, sol);
    const auto ref = tasks::reference_bound(inst);
    const double gap = relative_gap(obj, ref.value);
    sum_gap += gap;
    sum_obj += obj.value;
    out << tasks::name_of(inst) << "," << fmt("%.6g", obj.value) << "," << fmt("%.6g", ref.value)
        << "," << tasks::to_string(ref.kind) << "," << fmt("%.4f", gap) << "\n";
  }
  const double n = static_cast<double>(instances.size());
  out << "mean," << fmt("%.6g", sum_obj / n) << ",,," << fmt("%.4f", sum_gap / n) << "\n";
  return kExitOk;
}

int cmd_make_instances(const std::string& task, const tasks::GeneratorParams& params,
                       const std::string& seeds, const std::string& reference,
                       const std::string& out_dir, std::ostream& out) {
  const auto kind = tasks::parse_task_kind(task);
  fs::create_directories(out_dir);
  json manifest{{"task", std::string(tasks::to_string(kind))}, {"instances", json::array()}};
  for (auto s : parse_seed_list(seeds)) {
    const auto inst = tasks::generate_instance(kind, params, s);
    const std::string file = tasks::name_of(inst) + ".json";
    std::ofstream f(fs::path(out_dir) / file, std::ios::binary | std::ios::trunc);
    f << sandbox::instance_to_json(inst).dump() << "\n";
    json entry{{"path", file}};
    if (!reference.empty()) entry["reference"] = reference;
    manifest["instances"].push_back(entry);
    out << file << "\n";
  }
  {
    std::ofstream m(fs::path(out_dir) / "manifest.json", std::ios::binary | std::ios::trunc);
    m << manifest.dump(1) << "\n";
  }
  workflow::load_manifest(fs::path(out_dir) / "manifest.json", kind);
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& dirs, bool score, const std::string& plot_dir,
               std::ostream& out) {
  std::vector<RunMetrics> runs;
  for (const auto& d : dirs) {
    std::vector<json> summaries;
    runs.push_back(metrics(d, &summaries));
    const auto& m = runs.back();
    out << m.dir << ": gap=" << fmt("%.4f", m.best_gap_percent) << "% tokens=" << m.tokens
        << " wall_seconds=" << fmt("%.2f", m.wall_seconds) << " queries=" << m.queries
        << " generations=" << m.generations << (m.finished ? "" : " (in progress)") << "\n";
    if (!plot_dir.empty()) {
      const fs::path pd = fs::path(plot_dir) /
                          (dirs.size() == 1 ? std::string() : fs::path(d).filename().string());
      fs::create_directories(pd);
      std::ofstream g(pd / "best_vs_generation.csv", std::ios::binary | std::ios::trunc);
      std::ofstream t(pd / "best_vs_tokens.csv", std::ios::binary | std::ios::trunc);
      g << "generation,best_loss\n";
      t << "cumulative_tokens,best_loss\n";
      for (const auto& s : summaries) {
        const auto best = fmt("%.10g", s.value("best_loss", 0.0));
        g << s.value("generation", 0) << "," << best << "\n";
        t << s.value("tokens_in", 0L) + s.value("tokens_out", 0L) << "," << best << "\n";
      }
    }
  }
  if (score) {
    std::vector<double> obj, tok, time;
    for (const auto& m : runs) {
      obj.push_back(m.best_gap_percent);
      tok.push_back(static_cast<double>(m.tokens));
      time.push_back(m.wall_seconds);
    }
    const auto on = minmax_normalize(obj), tn = minmax_normalize(tok), wn = minmax_normalize(time);
    out << "run,obj_norm,token_norm,time_norm,composite\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      out << runs[i].dir << "," << fmt("%.4f", on[i]) << "," << fmt("%.4f", tn[i]) << ","
          << fmt("%.4f", wn[i]) << "," << fmt("%.4f", composite_score(on[i], tn[i], wn[i]))
          << "\n";
    }
  }
  return kExitOk;
}

int cmd_export_trace(const std::string& dir, const std::string& csv_path, std::ostream& out) {
  const auto records = read_jsonl(fs::path(dir) / "trace.jsonl");
  std::ofstream f;
  std::ostream* o = &out;
  if (!csv_path.empty()) {
    f.open(csv_path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + csv_path + "'");
    o = &f;
  }
  *o << "seq,generation,id,status,verdict,loss,cell,archive,failure,tokens_in,tokens_out,strategy\n";
  std::map<std::string, std::string> verdicts;
  for (const auto& r : records) {
    const auto type = r.value("type", "");
    if (type == "screen_decision") verdicts[r.value("id", "")] = r.value("verdict", "");
    if (type != "candidate") continue;
    const auto id = r.value("id", "");
    const auto failure = r.contains("failure") ? r["failure"].value("category", "") : "";
    *o << r.value("seq", 0L) << "," << r.value("generation", 0) << "," << csv_field(id) << ","
       << r.value("status", "") << "," << verdicts[id] << ","
       << (r.contains("loss") ? fmt("%.10g", r["loss"].get<double>()) : "") << ","
       << (r.contains("cell") ? json_scalar(r["cell"]) : "") << ","
       << (r.contains("archive") ? json_scalar(r["archive"]) : "") << "," << failure << ","
       << r.value("tokens_in", 0L) << "," << r.value("tokens_out", 0L) << ","
       << csv_field(r.value("strategy", "")) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"evoheur: multi-agent evolution of construction heuristics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an evolution");
  std::string config, backend, out_dir;
  std::uint64_t seed = 0;
  run->add_option("config", config, "run configuration (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "single seed instead of the configured list");
  run->add_option("--backend", backend, "http or replay:<fixtures.jsonl>");
  run->add_option("--out", out_dir, "output root");

  auto* resume = app.add_subcommand("resume", "continue a run from its latest snapshot");
  std::string resume_dir, snapshot;
  resume->add_option("dir", resume_dir, "run directory")->required();
  resume->add_option("--snapshot", snapshot, "specific state/gen_NNNN.json");

  auto* baseline = app.add_subcommand("baseline", "evaluate a classical baseline");
  std::string task, name, manifest;
  baseline->add_option("--task", task)->required();
  baseline->add_option("--name", name)->required();
  baseline->add_option("--manifest", manifest)->required();

  auto* make = app.add_subcommand("make-instances", "generate seeded instances and a manifest");
  std::string make_task, seeds = "0", reference, make_out;
  tasks::GeneratorParams params;
  make->add_option("--task", make_task)->required();
  make->add_option("--size", params.size, "cities, items or jobs")->required();
  make->add_option("--capacity", params.capacity, "bpp bin capacity");
  make->add_option("--constraints", params.constraints, "mkp constraints");
  make->add_option("--machines", params.machines, "pfsp machines");
  make->add_option("--seeds", seeds, "e.g. 0-4 or 1,3,5");
  make->add_option("--reference", reference, "exact, two_opt or neh");
  make->add_option("--out", make_out)->required();

  auto* report = app.add_subcommand("report", "print run metrics");
  std::vector<std::string> report_dirs;
  bool score = false;
  std::string plot_dir;
  report->add_option("dirs", report_dirs, "run directories")->required();
  report->add_flag("--score", score, "composite score across the given runs");
  report->add_option("--plot-dir", plot_dir, "write best-so-far series as CSV here");

  auto* exp = app.add_subcommand("export-trace", "candidate records as CSV");
  std::string exp_dir, csv;
  exp->add_option("dir", exp_dir, "run directory")->required();
  exp->add_option("--csv", csv, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      return cmd_run(config, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt,
                     backend, out_dir, out);
    }
    if (*resume) return cmd_resume(resume_dir, snapshot, out);
    if (*baseline) return cmd_baseline(task, name, manifest, out);
    if (*make) return cmd_make_instances(make_task, params, seeds, reference, make_out, out);
    if (*report) return cmd_report(report_dirs, score, plot_dir, out);
    if (*exp) return cmd_export_trace(exp_dir, csv, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage{"evoheur"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace evoheur::cli
