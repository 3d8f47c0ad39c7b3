// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <sstream>

#include "evoheur/errors.hpp"
#include "evoheur/sandbox.hpp"
#include "evoheur/workflow.hpp"

namespace evoheur::workflow {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return fs::absolute(base / p).lexically_normal();
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void apply_reference(tasks::Instance& inst, const json& ref) {
  if (ref.is_null()) return;
  double value = 0;
  if (ref.is_number()) {
    value = ref.get<double>();
  } else if (ref.is_string()) {
    const auto how = ref.get<std::string>();
    if (auto* t = std::get_if<tasks::TspInstance>(&inst)) {
      if (how == "exact") {
        value = tasks::tsp_exact_length(*t);
      } else if (how == "two_opt") {
        value = tasks::tsp_two_opt_length(*t);
      } else {
        throw ConfigError("tsp reference must be a number, exact or two_opt");
      }
    } else if (auto* p = std::get_if<tasks::PfspInstance>(&inst)) {
      if (how == "exact") {
        value = tasks::pfsp_exact_makespan(*p);
      } else if (how == "neh") {
        value = tasks::makespan(*p, tasks::neh(*p));
      } else {
        throw ConfigError("pfsp reference must be a number, exact or neh");
      }
    } else if (auto* m = std::get_if<tasks::MkpInstance>(&inst)) {
      if (how != "exact") throw ConfigError("mkp reference must be a number or exact");
      value = static_cast<double>(tasks::mkp_exact(*m));
    } else {
      throw ConfigError("bpp references are always the L2 bound");
    }
  } else {
    throw ConfigError("reference must be a number or a method name");
  }
  std::visit(
      [&](auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, tasks::BppInstance>) {
          throw ConfigError("bpp references are always the L2 bound");
        } else {
          i.reference = value;
        }
      },
      inst);
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(generations >= 1, "generations");
  positive(population >= 1, "population");
  positive(proposals >= 1, "proposals");
  positive(retrieval >= 1, "retrieval");
  positive(centroids >= 1, "centroids");
  positive(patience >= 1, "patience");
  positive(min_improvement > 0 && std::isfinite(min_improvement), "min_improvement");
  positive(n_proc >= 1, "n_proc");
  positive(candidate_timeout_seconds > 0, "candidate_timeout_seconds");
  positive(cvt_samples >= centroids, "cvt_samples");
  positive(cvt_iterations >= 1, "cvt_iterations");
  positive(prompt_char_budget > 0, "prompt_char_budget");
  if (!(keep_ratio > 0 && keep_ratio <= 1)) throw ConfigError("keep_ratio must be in (0, 1]");
  if (time_budget_seconds < 0) throw ConfigError("time_budget_seconds must be non-negative");
  if (token_budget < 0) throw ConfigError("token_budget must be non-negative");
  if (memory_cap_bytes < 0) throw ConfigError("memory_cap_bytes must be non-negative");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (manifest.empty()) throw ConfigError("manifest is required");
  if (backend.kind == "replay") {
    if (backend.fixtures.empty()) throw ConfigError("replay backend needs a fixtures path");
  } else if (backend.kind == "http") {
    if (backend.http.model.empty()) throw ConfigError("http backend needs a model");
  } else {
    throw ConfigError("backend kind must be replay or http");
  }
}

RunConfig config_from_json(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "task", "generations", "population", "proposals", "retrieval", "centroids", "patience",
      "min_improvement", "keep_ratio", "n_proc", "time_budget_seconds", "token_budget",
      "candidate_timeout_seconds", "memory_cap_bytes", "seeds", "backend", "manifest", "out",
      "runner", "prompt_char_budget", "cvt_samples", "cvt_iterations"};
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  RunConfig c;
  std::string task;
  take(j, "task", task);
  if (task.empty()) throw ConfigError("config key 'task' is required");
  c.task = tasks::parse_task_kind(task);
  take(j, "generations", c.generations);
  take(j, "population", c.population);
  take(j, "proposals", c.proposals);
  take(j, "retrieval", c.retrieval);
  take(j, "centroids", c.centroids);
  take(j, "patience", c.patience);
  take(j, "min_improvement", c.min_improvement);
  take(j, "keep_ratio", c.keep_ratio);
  take(j, "n_proc", c.n_proc);
  take(j, "time_budget_seconds", c.time_budget_seconds);
  take(j, "token_budget", c.token_budget);
  take(j, "candidate_timeout_seconds", c.candidate_timeout_seconds);
  take(j, "memory_cap_bytes", c.memory_cap_bytes);
  take(j, "seeds", c.seeds);
  take(j, "manifest", c.manifest);
  take(j, "out", c.out);
  take(j, "runner", c.runner);
  take(j, "prompt_char_budget", c.prompt_char_budget);
  take(j, "cvt_samples", c.cvt_samples);
  take(j, "cvt_iterations", c.cvt_iterations);
  c.manifest = resolve(base, c.manifest).string();
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    if (!b.is_object()) throw ConfigError("config key 'backend' must be an object");
    static const std::set<std::string> bknown{"kind", "fixtures", "base_url", "model",
                                              "temperature", "api_key_env", "max_attempts",
                                              "backoff_seconds", "timeout_seconds"};
    for (const auto& [k, _] : b.items()) {
      if (!bknown.count(k)) throw ConfigError("unknown backend key '" + k + "'");
    }
    take(b, "kind", c.backend.kind);
    take(b, "fixtures", c.backend.fixtures);
    take(b, "base_url", c.backend.http.base_url);
    take(b, "model", c.backend.http.model);
    take(b, "temperature", c.backend.http.temperature);
    take(b, "api_key_env", c.backend.http.api_key_env);
    take(b, "max_attempts", c.backend.http.max_attempts);
    take(b, "backoff_seconds", c.backend.http.backoff_seconds);
    take(b, "timeout_seconds", c.backend.http.timeout_seconds);
    c.backend.fixtures = resolve(base, c.backend.fixtures).string();
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json b{{"kind", c.backend.kind}};
  if (c.backend.kind == "replay") {
    b["fixtures"] = c.backend.fixtures;
  } else {
    b["base_url"] = c.backend.http.base_url;
    b["model"] = c.backend.http.model;
    b["temperature"] = c.backend.http.temperature;
    b["api_key_env"] = c.backend.http.api_key_env;
    b["max_attempts"] = c.backend.http.max_attempts;
    b["backoff_seconds"] = c.backend.http.backoff_seconds;
    b["timeout_seconds"] = c.backend.http.timeout_seconds;
  }
  return {{"task", std::string(tasks::to_string(c.task))},
          {"generations", c.generations},
          {"population", c.population},
          {"proposals", c.proposals},
          {"retrieval", c.retrieval},
          {"centroids", c.centroids},
          {"patience", c.patience},
          {"min_improvement", c.min_improvement},
          {"keep_ratio", c.keep_ratio},
          {"n_proc", c.n_proc},
          {"time_budget_seconds", c.time_budget_seconds},
          {"token_budget", c.token_budget},
          {"candidate_timeout_seconds", c.candidate_timeout_seconds},
          {"memory_cap_bytes", c.memory_cap_bytes},
          {"seeds", c.seeds},
          {"backend", b},
          {"manifest", c.manifest},
          {"out", c.out},
          {"runner", c.runner},
          {"prompt_char_budget", c.prompt_char_budget},
          {"cvt_samples", c.cvt_samples},
          {"cvt_iterations", c.cvt_iterations}};
}

RunConfig load_config(const fs::path& path) {
  const auto text = read_file(path);
  const auto j = json::parse(text, nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("config '" + path.string() + "' is not valid JSON");
  return config_from_json(j, path.parent_path());
}

std::vector<tasks::Instance> manifest_instances(const json& manifest, tasks::TaskKind expected,
                                                const fs::path& base) {
  if (!manifest.is_object() || !manifest.contains("instances") ||
      !manifest["instances"].is_array()) {
    throw ConfigError("manifest needs an 'instances' array");
  }
  if (manifest.contains("task") &&
      tasks::parse_task_kind(manifest["task"].get<std::string>()) != expected) {
    throw ConfigError("manifest task does not match the configured task");
  }
  std::vector<tasks::Instance> out;
  for (const auto& e : manifest["instances"]) {
    if (!e.is_object()) throw ConfigError("manifest entries must be objects");
    tasks::Instance inst;
    if (e.contains("generate")) {
      const auto& g = e["generate"];
      tasks::GeneratorParams p;
      take(g, "size", p.size);
      take(g, "capacity", p.capacity);
      take(g, "constraints", p.constraints);
      take(g, "machines", p.machines);
      std::uint64_t seed = 0;
      take(g, "seed", seed);
      inst = tasks::generate_instance(expected, p, seed);
    } else if (e.contains("path")) {
      const fs::path p = resolve(base, e["path"].get<std::string>());
      const auto text = read_file(p);
      if (p.extension() == ".json") {
        const auto j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw ConfigError("'" + p.string() + "' is not valid JSON");
        inst = sandbox::instance_from_json(j);
      } else {
        inst = tasks::parse_instance(expected, text, p.stem().string());
      }
    } else if (e.contains("instance")) {
      inst = sandbox::instance_from_json(e["instance"]);
    } else {
      throw ConfigError("manifest entry needs generate, path or instance");
    }
    if (tasks::kind_of(inst) != expected) {
      throw ConfigError("manifest instance '" + tasks::name_of(inst) + "' has the wrong task");
    }
    if (e.contains("reference")) apply_reference(inst, e["reference"]);
    out.push_back(std::move(inst));
  }
  if (out.empty()) throw ConfigError("manifest lists no instances");
  return out;
}

std::vector<tasks::Instance> load_manifest(const fs::path& path, tasks::TaskKind expected) {
  const auto j = json::parse(read_file(path), nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("manifest '" + path.string() + "' is not valid JSON");
  return manifest_instances(j, expected, path.parent_path());
}

}  // namespace evoheur::workflow
