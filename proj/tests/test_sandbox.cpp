// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <gtest/gtest.h>

#include <json.hpp>

#include "evoheur/errors.hpp"
#include "evoheur/sandbox.hpp"
#include "evoheur/stub_runner.hpp"
#include "test_util.hpp"

namespace evoheur::sandbox {
namespace {

using nlohmann::json;
using tasks::TaskKind;

TEST(Protocol, RequestRoundTrip) {
  const Request r{7, "load", {{"source", "x"}, {"entry_point", "f"}}};
  const auto line = encode(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = json::parse(line);
  EXPECT_EQ(j["v"], kProtocolVersion);
  const auto back = decode_request(line);
  EXPECT_EQ(back.id, 7);
  EXPECT_EQ(back.msg, "load");
  EXPECT_EQ(back.payload, r.payload);
}

TEST(Protocol, ResponseRoundTrip) {
  const Response ok{3, true, {{"objective", 4.0}}};
  const auto back = decode_response(encode(ok));
  EXPECT_EQ(back.id, 3);
  EXPECT_TRUE(back.ok);
  EXPECT_EQ(back.payload["objective"], 4.0);
  EXPECT_EQ(json::parse(encode(ok))["status"], "ok");
  const Response err{4, false, {{"category", "crash"}}};
  EXPECT_FALSE(decode_response(encode(err)).ok);
  EXPECT_EQ(json::parse(encode(err))["status"], "error");
}

TEST(Protocol, MalformedMessages) {
  EXPECT_THROW(decode_request("not json"), ParseError);
  EXPECT_THROW(decode_request("[]"), ParseError);
  EXPECT_THROW(decode_request(R"({"v":1,"id":1})"), ParseError);
  EXPECT_THROW(decode_response(R"({"id":1,"status":"maybe","payload":{}})"), ParseError);
  EXPECT_THROW(decode_response("Traceback (most recent call last):"), ParseError);
}

TEST(InstanceJson, RoundTripEveryTask) {
  for (auto kind : {TaskKind::kTsp, TaskKind::kBpp, TaskKind::kMkp, TaskKind::kPfsp}) {
    SCOPED_TRACE(tasks::to_string(kind));
    const auto inst = tasks::generate_instance(
        kind, {.size = 9, .capacity = 100, .constraints = 3, .machines = 4}, 11);
    const auto j = instance_to_json(inst);
    EXPECT_EQ(instance_to_json(instance_from_json(j)), j);
    EXPECT_EQ(tasks::kind_of(instance_from_json(j)), kind);
  }
}

TEST(InstanceJson, WireKinds) {
  tasks::BppInstance b;
  b.capacity = 100;
  b.items = {1, 2};
  const auto j = instance_to_json(b);
  EXPECT_EQ(j["kind"], "bpp_online");
  EXPECT_EQ(j["capacity"], 100);
}

TEST(InstanceJson, Errors) {
  EXPECT_THROW(instance_from_json(json{{"kind", "sat"}}), ConfigError);
  EXPECT_THROW(instance_from_json(json{{"kind", "bpp_online"}, {"items", {1}}}), ConfigError);
  EXPECT_THROW(instance_from_json(json{{"kind", "pfsp"}, {"ptimes", {{1, 2}, {3}}}}),
               ConfigError);
  EXPECT_THROW(instance_from_json(json{{"kind", "mkp"},
                                       {"values", {1, 2}},
                                       {"weights", {{1}}},
                                       {"capacities", {5}}}),
               ConfigError);
}

TEST(DriverDirective, StartNodeOnlyForTsp) {
  EXPECT_EQ(driver_directive(TaskKind::kTsp)["start_node"], 0);
  EXPECT_EQ(driver_directive(TaskKind::kTsp)["entry_point"], "select_next_node");
  EXPECT_FALSE(driver_directive(TaskKind::kBpp).contains("start_node"));
}

TEST(StubDirective, Parsing) {
  const auto d = parse_stub_directive("x = 1\n  # stub-policy: tsp.weighted near=2 look=-0.5\n");
  EXPECT_EQ(d.policy, "tsp.weighted");
  EXPECT_EQ(d.param("near", 0), 2.0);
  EXPECT_EQ(d.param("look", 0), -0.5);
  EXPECT_EQ(d.param("dest", 7), 7.0);
  EXPECT_THROW(parse_stub_directive("def f():\n    return 0\n"), ConfigError);
  EXPECT_THROW(parse_stub_directive("# stub-policy: crash at=x\n"), ConfigError);
}

TEST(StubDirective, PolicyMustFitTask) {
  EXPECT_THROW(make_stub_policy({"bpp.weighted", {}}, TaskKind::kTsp), ConfigError);
  EXPECT_THROW(make_stub_policy({"nope", {}}, TaskKind::kTsp), ConfigError);
  EXPECT_NE(make_stub_policy({"crash", {}}, TaskKind::kMkp), nullptr);
}

// Feeds `requests` to the in-process runner and returns its decoded replies.
std::vector<Response> converse(const std::vector<Request>& requests) {
  std::stringstream in, out;
  for (const auto& r : requests) in << encode(r) << '\n';
  run_stub_runner(in, out);
  std::vector<Response> replies;
  std::string line;
  while (std::getline(out, line)) replies.push_back(decode_response(line));
  return replies;
}

Request load(long id, const std::string& fixture, TaskKind kind) {
  return {id, "load",
          {{"source", test::read_file(test::fixture("guest/" + fixture + ".py"))},
           {"entry_point", tasks::task_contract(kind).entry_point},
           {"task_kind", tasks::to_string(kind)}}};
}

Request run(long id, const tasks::Instance& inst) {
  return {id, "run_instance",
          {{"instance", instance_to_json(inst)},
           {"driver", driver_directive(tasks::kind_of(inst))}}};
}

TEST(StubRunner, NearestNeighborOnThreeCollinearCities) {
  tasks::TspInstance t;
  t.coords = {{0, 0}, {1, 0}, {2, 0}};
  const auto r = converse({{1, "handshake", json::object()}, load(2, "tsp_nearest", TaskKind::kTsp),
                           run(3, t), {4, "shutdown", json::object()}});
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].payload["protocol"], kProtocolVersion);
  EXPECT_TRUE(r[1].ok);
  ASSERT_TRUE(r[2].ok) << r[2].payload.dump();
  EXPECT_EQ(r[2].id, 3);
  EXPECT_EQ(r[2].payload["objective"], 4.0);
  EXPECT_EQ(r[2].payload["decisions"], (json{1, 2}));
  EXPECT_EQ(r[2].payload["steps"], 2);
}

TEST(StubRunner, BestFitPacksIntoTwoBins) {
  tasks::BppInstance b;
  b.capacity = 100;
  b.items = {60, 40, 30, 70};
  const auto r = converse({{1, "handshake", json::object()}, load(2, "bpp_best_fit", TaskKind::kBpp),
                           run(3, b)});
  ASSERT_EQ(r.size(), 3u);
  ASSERT_TRUE(r[2].ok) << r[2].payload.dump();
  EXPECT_EQ(r[2].payload["objective"], 2.0);
  EXPECT_EQ(r[2].payload["decisions"].size(), 4u);
}

TEST(StubRunner, HandshakeRequired) {
  const auto r = converse({load(1, "tsp_nearest", TaskKind::kTsp)});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].ok);
  EXPECT_EQ(r[0].payload["category"], "protocol");
}

TEST(StubRunner, LoadErrors) {
  Request bad = load(3, "tsp_nearest", TaskKind::kTsp);
  bad.payload["source"] = "import os\n" + bad.payload["source"].get<std::string>();
  const auto r = converse({{1, "handshake", json::object()},
                           load(2, "syntax_error", TaskKind::kTsp),
                           bad,
                           load(4, "bpp_best_fit", TaskKind::kTsp),
                           run(5, tasks::BppInstance{})});
  ASSERT_EQ(r.size(), 5u);
  for (int i = 1; i < 5; ++i) {
    EXPECT_FALSE(r[i].ok);
    EXPECT_EQ(r[i].payload["category"], "load") << i;
  }
  EXPECT_NE(r[2].payload["message"].get<std::string>().find("deny_list"), std::string::npos);
}

TEST(StubRunner, FaultCategories) {
  const auto t = std::get<tasks::TspInstance>(
      tasks::generate_instance(TaskKind::kTsp, {.size = 6}, 0));
  const auto crash =
      converse({{1, "handshake", json::object()}, load(2, "tsp_crash", TaskKind::kTsp), run(3, t)});
  EXPECT_EQ(crash[2].payload["category"], "crash");
  const auto invalid =
      converse({{1, "handshake", json::object()}, load(2, "tsp_invalid", TaskKind::kTsp), run(3, t)});
  EXPECT_EQ(invalid[2].payload["category"], "infeasible_decision");
  EXPECT_EQ(invalid[2].payload["step"], 1);
}

TEST(StubRunner, UnknownMessageAndBadLine) {
  std::stringstream in("garbage line\n" + encode(Request{1, "handshake", json::object()}) + "\n" +
                       encode(Request{2, "dance", json::object()}) + "\n");
  std::stringstream out;
  EXPECT_EQ(run_stub_runner(in, out), 0);
  std::vector<Response> r;
  std::string line;
  while (std::getline(out, line)) r.push_back(decode_response(line));
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].payload["category"], "protocol");
  EXPECT_EQ(r[2].payload["category"], "protocol");
}

}  // namespace
}  // namespace evoheur::sandbox
