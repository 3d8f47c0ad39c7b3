// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "evoheur/errors.hpp"
#include "evoheur/sandbox.hpp"
#include "evoheur/tasks/contract.hpp"

namespace evoheur::sandbox {

using nlohmann::json;

namespace {

json parse_object(std::string_view line) {
  const auto j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("message is not a JSON object", 1);
  return j;
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("instance field '") + key + "': " + e.what());
  }
}

template <typename T>
std::vector<std::vector<T>> matrix(const json& j, const char* key) {
  auto m = field<std::vector<std::vector<T>>>(j, key);
  for (const auto& row : m) {
    if (row.size() != m.front().size()) {
      throw ConfigError(std::string("instance field '") + key + "' is ragged");
    }
  }
  return m;
}

}  // namespace

std::string encode(const Request& r) {
  return json{{"v", kProtocolVersion}, {"id", r.id}, {"msg", r.msg}, {"payload", r.payload}}
      .dump();
}

std::string encode(const Response& r) {
  return json{{"id", r.id}, {"status", r.ok ? "ok" : "error"}, {"payload", r.payload}}.dump();
}

Request decode_request(std::string_view line) {
  const json j = parse_object(line);
  Request r;
  try {
    r.id = j.at("id").get<long>();
    r.msg = j.at("msg").get<std::string>();
    if (j.contains("payload")) r.payload = j.at("payload");
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad request: ") + e.what(), 1);
  }
  if (!r.payload.is_object()) throw ParseError("request payload must be an object", 1);
  return r;
}

Response decode_response(std::string_view line) {
  const json j = parse_object(line);
  Response r;
  try {
    r.id = j.at("id").get<long>();
    const auto status = j.at("status").get<std::string>();
    if (status != "ok" && status != "error") throw ParseError("bad status '" + status + "'", 1);
    r.ok = status == "ok";
    if (j.contains("payload")) r.payload = j.at("payload");
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad response: ") + e.what(), 1);
  }
  if (!r.payload.is_object()) throw ParseError("response payload must be an object", 1);
  return r;
}

json instance_to_json(const tasks::Instance& inst) {
  json j;
  j["kind"] = std::string(tasks::to_string(tasks::kind_of(inst)));
  j["name"] = tasks::name_of(inst);
  std::visit(
      [&](const auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, tasks::TspInstance>) {
          json coords = json::array();
          for (const auto& c : i.coords) coords.push_back({c[0], c[1]});
          j["coords"] = coords;
          j["distance"] =
              i.rule == tasks::DistanceRule::kRoundedEuclidean ? "euc_2d_nint" : "euclidean";
          if (i.reference) j["reference"] = *i.reference;
        } else if constexpr (std::is_same_v<T, tasks::BppInstance>) {
          j["capacity"] = i.capacity;
          j["items"] = i.items;
        } else if constexpr (std::is_same_v<T, tasks::MkpInstance>) {
          j["values"] = i.values;
          j["weights"] = i.weights;
          j["capacities"] = i.capacities;
          if (i.reference) j["reference"] = *i.reference;
        } else {
          j["ptimes"] = i.ptimes;
          if (i.reference) j["reference"] = *i.reference;
        }
      },
      inst);
  return j;
}

tasks::Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("instance must be a JSON object");
  const auto kind = tasks::parse_task_kind(field<std::string>(j, "kind"));
  const std::string name = j.value("name", "");
  std::optional<double> reference;
  if (j.contains("reference") && !j["reference"].is_null()) reference = field<double>(j, "reference");
  switch (kind) {
    case tasks::TaskKind::kTsp: {
      tasks::TspInstance t;
      t.name = name;
      for (const auto& c : field<std::vector<std::vector<double>>>(j, "coords")) {
        if (c.size() != 2) throw ConfigError("tsp coordinates must be pairs");
        t.coords.push_back({c[0], c[1]});
      }
      const auto rule = j.value("distance", std::string("euclidean"));
      if (rule == "euc_2d_nint") {
        t.rule = tasks::DistanceRule::kRoundedEuclidean;
      } else if (rule == "euclidean") {
        t.rule = tasks::DistanceRule::kExactEuclidean;
      } else {
        throw ConfigError("unknown distance rule '" + rule + "'");
      }
      if (t.size() < 3) throw ConfigError("tsp instance needs at least 3 cities");
      t.reference = reference;
      return t;
    }
    case tasks::TaskKind::kBpp: {
      tasks::BppInstance b;
      b.name = name;
      b.capacity = field<int>(j, "capacity");
      b.items = field<std::vector<int>>(j, "items");
      if (b.capacity < 1) throw ConfigError("bpp capacity must be positive");
      for (int s : b.items) {
        if (s < 1 || s > b.capacity) throw ConfigError("bpp item size outside [1, capacity]");
      }
      return b;
    }
    case tasks::TaskKind::kMkp: {
      tasks::MkpInstance m;
      m.name = name;
      m.values = field<std::vector<int>>(j, "values");
      m.weights = matrix<int>(j, "weights");
      m.capacities = field<std::vector<int>>(j, "capacities");
      if (m.weights.size() != m.capacities.size()) {
        throw ConfigError("mkp weights need one row per capacity");
      }
      for (const auto& row : m.weights) {
        if (row.size() != m.values.size()) throw ConfigError("mkp weight row length mismatch");
      }
      m.reference = reference;
      return m;
    }
    case tasks::TaskKind::kPfsp: {
      tasks::PfspInstance p;
      p.name = name;
      p.ptimes = matrix<int>(j, "ptimes");
      for (const auto& row : p.ptimes) {
        if (row.empty() || std::any_of(row.begin(), row.end(), [](int v) { return v <= 0; })) {
          throw ConfigError("pfsp processing times must be positive");
        }
      }
      p.reference = reference;
      return p;
    }
  }
  throw ConfigError("unknown task kind");
}

json driver_directive(tasks::TaskKind kind) {
  json d{{"task", std::string(tasks::to_string(kind))},
         {"entry_point", tasks::task_contract(kind).entry_point}};
  if (kind == tasks::TaskKind::kTsp) d["start_node"] = 0;
  return d;
}

}  // namespace evoheur::sandbox
