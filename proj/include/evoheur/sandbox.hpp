// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Line-delimited JSON protocol between the host and a guest runner.
//
//   request  {"v":1,"id":N,"msg":"handshake"|"load"|"run_instance"|"shutdown","payload":{...}}
//   response {"id":N,"status":"ok"|"error","payload":{...}}
//
// load payload          {source, entry_point, task_kind}
// run_instance payload  {instance, driver}
// run_instance ok       {objective, decisions, steps, wall_seconds}
// error payload         {category: load|infeasible_decision|crash|protocol, message, step}
//
// Every run_instance executes the loaded source in a fresh module namespace,
// so module-level state never carries over between instances.

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "evoheur/tasks.hpp"

namespace evoheur::sandbox {

inline constexpr int kProtocolVersion = 1;

struct Request {
  long id = 0;
  std::string msg;
  nlohmann::json payload = nlohmann::json::object();
};

struct Response {
  long id = 0;
  bool ok = false;
  nlohmann::json payload = nlohmann::json::object();
};

// Single line, no trailing newline.
std::string encode(const Request& r);
std::string encode(const Response& r);

// Throw ParseError (line 1) on malformed messages.
Request decode_request(std::string_view line);
Response decode_response(std::string_view line);

// Instance wire format:
//   tsp  {"kind":"tsp_construct","name","coords":[[x,y],..],"distance":"euc_2d_nint"|"euclidean"}
//   bpp  {"kind":"bpp_online","name","capacity","items":[..]}
//   mkp  {"kind":"mkp","name","values":[..],"weights":[[..],..],"capacities":[..]}
//   pfsp {"kind":"pfsp","name","ptimes":[[..],..]}   (jobs x machines)
// plus an optional "reference".
nlohmann::json instance_to_json(const tasks::Instance& inst);
// Throws ConfigError on missing or inconsistent fields.
tasks::Instance instance_from_json(const nlohmann::json& j);

// {"task": <wire name>, "entry_point": ..., "start_node": 0} (start_node for tsp only).
nlohmann::json driver_directive(tasks::TaskKind kind);

}  // namespace evoheur::sandbox
