// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/tasks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "evoheur/rng.hpp"

namespace evoheur::tasks {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

bool parse_long(const std::string& s, long& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

TspInstance parse_tsplib(std::string_view text, std::string name) {
  TspInstance inst;
  inst.name = std::move(name);
  inst.rule = DistanceRule::kRoundedEuclidean;
  const auto lines = split_lines(text);
  long dimension = -1;
  bool saw_type = false;
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    const int lineno = static_cast<int>(i) + 1;
    if (line.empty()) continue;
    const std::string up = upper(line);
    if (up.rfind("NODE_COORD_SECTION", 0) == 0) break;
    if (up == "EOF") throw ParseError("EOF before NODE_COORD_SECTION", lineno);
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'KEY : value'", lineno);
    const std::string key = upper(trim(line.substr(0, colon)));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "NAME") {
      if (inst.name.empty()) inst.name = value;
    } else if (key == "DIMENSION") {
      if (!parse_long(value, dimension) || dimension < 1) {
        throw ParseError("invalid DIMENSION '" + value + "'", lineno);
      }
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (upper(value) != "EUC_2D") {
        throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + value + "'", lineno);
      }
      saw_type = true;
    } else if (key == "TYPE") {
      if (upper(value) != "TSP") throw ParseError("unsupported TYPE '" + value + "'", lineno);
    }
    // COMMENT and other keys are ignored.
  }
  if (i == lines.size()) throw ParseError("missing NODE_COORD_SECTION", static_cast<int>(i));
  if (dimension < 0) throw ParseError("missing DIMENSION", static_cast<int>(i) + 1);
  if (!saw_type) throw ParseError("missing EDGE_WEIGHT_TYPE", static_cast<int>(i) + 1);
  for (++i; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    const int lineno = static_cast<int>(i) + 1;
    if (line.empty()) continue;
    if (upper(line) == "EOF") break;
    const auto w = words(line);
    double x = 0, y = 0;
    long id = 0;
    if (w.size() != 3 || !parse_long(w[0], id) || !parse_double(w[1], x) || !parse_double(w[2], y)) {
      throw ParseError("expected '<id> <x> <y>'", lineno);
    }
    if (id != static_cast<long>(inst.coords.size()) + 1) {
      throw ParseError("node ids must run 1..DIMENSION in order", lineno);
    }
    inst.coords.push_back({x, y});
  }
  if (static_cast<long>(inst.coords.size()) != dimension) {
    throw ParseError("expected " + std::to_string(dimension) + " nodes, found " +
                         std::to_string(inst.coords.size()),
                     static_cast<int>(std::min(i + 1, lines.size())));
  }
  if (inst.size() < 3) throw ParseError("at least 3 cities required", 1);
  return inst;
}

// Accepts both the distributed layout (a descriptive header line, the
// "jobs machines seed upper lower" line, "processing times :", then one row
// per machine) and a bare "jobs machines" line followed by the rows.
PfspInstance parse_taillard(std::string_view text, std::string name) {
  PfspInstance inst;
  inst.name = std::move(name);
  const auto lines = split_lines(text);
  std::vector<long> numbers;
  std::vector<int> number_lines;
  long jobs = -1, machines = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    const auto w = words(lines[i]);
    if (w.empty()) continue;
    long first = 0;
    if (!parse_long(w[0], first)) {
      if (jobs >= 0 && !numbers.empty()) throw ParseError("unexpected text in matrix", lineno);
      continue;  // header prose
    }
    std::vector<long> row;
    for (const auto& tok : w) {
      long v = 0;
      if (!parse_long(tok, v)) throw ParseError("non-integer token '" + tok + "'", lineno);
      row.push_back(v);
    }
    if (jobs < 0) {
      if (row.size() < 2 || row[0] < 1 || row[1] < 1) {
        throw ParseError("expected 'jobs machines' header", lineno);
      }
      jobs = row[0];
      machines = row[1];
      if (row.size() >= 4) inst.reference = static_cast<double>(row[3]);
      continue;
    }
    for (long v : row) {
      numbers.push_back(v);
      number_lines.push_back(lineno);
    }
  }
  if (jobs < 0) throw ParseError("missing 'jobs machines' header", static_cast<int>(lines.size()));
  if (static_cast<long>(numbers.size()) != jobs * machines) {
    throw ParseError("expected " + std::to_string(jobs * machines) + " processing times, found " +
                         std::to_string(numbers.size()),
                     static_cast<int>(lines.size()));
  }
  inst.ptimes.assign(jobs, std::vector<int>(machines, 0));
  for (long k = 0; k < machines; ++k) {
    for (long j = 0; j < jobs; ++j) {
      const std::size_t at = k * jobs + j;
      if (numbers[at] <= 0) throw ParseError("processing times must be positive", number_lines[at]);
      inst.ptimes[j][k] = static_cast<int>(numbers[at]);
    }
  }
  return inst;
}

void check_tour(const TspInstance& inst, const Tour& tour) {
  const int n = inst.size();
  if (static_cast<int>(tour.order.size()) != n) {
    throw FeasibilityError("tour visits " + std::to_string(tour.order.size()) + " of " +
                           std::to_string(n) + " cities");
  }
  std::vector<char> seen(n, 0);
  for (int c : tour.order) {
    if (c < 0 || c >= n) throw FeasibilityError("tour city " + std::to_string(c) + " out of range");
    if (seen[c]) throw FeasibilityError("tour visits city " + std::to_string(c) + " twice");
    seen[c] = 1;
  }
}

void check_packing(const BppInstance& inst, const Packing& packing) {
  if (packing.bin_of_item.size() != inst.items.size()) {
    throw FeasibilityError("packing assigns " + std::to_string(packing.bin_of_item.size()) +
                           " of " + std::to_string(inst.items.size()) + " items");
  }
  std::vector<long> load;
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    const int b = packing.bin_of_item[i];
    if (b < 0 || b > static_cast<int>(load.size())) {
      throw FeasibilityError("item " + std::to_string(i) + " goes to bin " + std::to_string(b) +
                             " before it is opened");
    }
    if (b == static_cast<int>(load.size())) load.push_back(0);
    load[b] += inst.items[i];
    if (load[b] > inst.capacity) {
      throw FeasibilityError("bin " + std::to_string(b) + " overflows at item " +
                             std::to_string(i));
    }
  }
}

void check_selection(const MkpInstance& inst, const Selection& sel) {
  std::vector<char> seen(inst.items(), 0);
  std::vector<long> load(inst.constraints(), 0);
  for (int item : sel.items) {
    if (item < 0 || item >= inst.items()) {
      throw FeasibilityError("item " + std::to_string(item) + " out of range");
    }
    if (seen[item]) throw FeasibilityError("item " + std::to_string(item) + " selected twice");
    seen[item] = 1;
    for (int c = 0; c < inst.constraints(); ++c) load[c] += inst.weights[c][item];
  }
  for (int c = 0; c < inst.constraints(); ++c) {
    if (load[c] > inst.capacities[c]) {
      throw FeasibilityError("knapsack constraint " + std::to_string(c) + " exceeded");
    }
  }
}

void check_schedule(const PfspInstance& inst, const Schedule& sched) {
  const int n = inst.jobs();
  if (static_cast<int>(sched.jobs.size()) != n) {
    throw FeasibilityError("schedule lists " + std::to_string(sched.jobs.size()) + " of " +
                           std::to_string(n) + " jobs");
  }
  std::vector<char> seen(n, 0);
  for (int j : sched.jobs) {
    if (j < 0 || j >= n) throw FeasibilityError("job " + std::to_string(j) + " out of range");
    if (seen[j]) throw FeasibilityError("job " + std::to_string(j) + " scheduled twice");
    seen[j] = 1;
  }
}

int weibull_item(Rng& rng, int capacity) {
  const double u = rng.uniform01();
  const double x = 45.0 * std::cbrt(-std::log1p(-u));
  const int hi = std::min(100, capacity);
  return std::clamp(static_cast<int>(std::ceil(x)), 1, hi);
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kTsp: return "tsp_construct";
    case TaskKind::kBpp: return "bpp_online";
    case TaskKind::kMkp: return "mkp";
    case TaskKind::kPfsp: return "pfsp";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "tsp_construct" || name == "tsp") return TaskKind::kTsp;
  if (name == "bpp_online" || name == "bpp") return TaskKind::kBpp;
  if (name == "mkp") return TaskKind::kMkp;
  if (name == "pfsp") return TaskKind::kPfsp;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

Direction direction(TaskKind kind) {
  return kind == TaskKind::kMkp ? Direction::kMaximize : Direction::kMinimize;
}

std::string_view to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::kStored: return "stored";
    case ReferenceKind::kExact: return "exact";
    case ReferenceKind::kLowerBound: return "lower_bound";
    case ReferenceKind::kSurrogateUpperBound: return "surrogate_upper_bound";
  }
  return "unknown";
}

TaskKind kind_of(const Instance& inst) {
  return static_cast<TaskKind>(inst.index());
}

const std::string& name_of(const Instance& inst) {
  return std::visit([](const auto& i) -> const std::string& { return i.name; }, inst);
}

Instance generate_instance(TaskKind kind, const GeneratorParams& params, std::uint64_t seed) {
  if (params.size < 1) throw ConfigError("generator size must be positive");
  Rng rng(seed);
  const std::string suffix = "_n" + std::to_string(params.size) + "_s" + std::to_string(seed);
  switch (kind) {
    case TaskKind::kTsp: {
      if (params.size < 3) throw ConfigError("tsp generator needs at least 3 cities");
      TspInstance inst;
      inst.name = "tsp" + suffix;
      inst.rule = DistanceRule::kExactEuclidean;
      for (int i = 0; i < params.size; ++i) {
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        inst.coords.push_back({x, y});
      }
      return inst;
    }
    case TaskKind::kBpp: {
      if (params.capacity < 1) throw ConfigError("bpp capacity must be positive");
      BppInstance inst;
      inst.name = "bpp_c" + std::to_string(params.capacity) + suffix;
      inst.capacity = params.capacity;
      inst.items.reserve(params.size);
      for (int i = 0; i < params.size; ++i) inst.items.push_back(weibull_item(rng, params.capacity));
      return inst;
    }
    case TaskKind::kMkp: {
      if (params.constraints < 1) throw ConfigError("mkp generator needs constraints >= 1");
      MkpInstance inst;
      inst.name = "mkp_m" + std::to_string(params.constraints) + suffix;
      for (int j = 0; j < params.size; ++j) {
        inst.values.push_back(static_cast<int>(rng.uniform_int(1, 100)));
      }
      inst.weights.assign(params.constraints, std::vector<int>(params.size, 0));
      for (int c = 0; c < params.constraints; ++c) {
        for (int j = 0; j < params.size; ++j) {
          inst.weights[c][j] = static_cast<int>(rng.uniform_int(1, 100));
        }
      }
      for (int c = 0; c < params.constraints; ++c) {
        inst.capacities.push_back(static_cast<int>(rng.uniform_int(100, 500)));
      }
      return inst;
    }
    case TaskKind::kPfsp: {
      if (params.machines < 1) throw ConfigError("pfsp generator needs machines >= 1");
      PfspInstance inst;
      inst.name = "pfsp_m" + std::to_string(params.machines) + suffix;
      inst.ptimes.assign(params.size, std::vector<int>(params.machines, 0));
      // Machine-major draw order, as in the Taillard generator.
      for (int k = 0; k < params.machines; ++k) {
        for (int j = 0; j < params.size; ++j) {
          inst.ptimes[j][k] = static_cast<int>(rng.uniform_int(1, 99));
        }
      }
      return inst;
    }
  }
  throw ConfigError("unknown task kind");
}

Instance parse_instance(TaskKind kind, std::string_view text, std::string name) {
  switch (kind) {
    case TaskKind::kTsp: return parse_tsplib(text, std::move(name));
    case TaskKind::kPfsp: return parse_taillard(text, std::move(name));
    default:
      throw ConfigError("no text instance format for " + std::string(to_string(kind)));
  }
}

std::vector<int> parse_tsplib_tour(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<int> tour;
  bool in_section = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    const int lineno = static_cast<int>(i) + 1;
    if (line.empty()) continue;
    if (!in_section) {
      if (upper(line).rfind("TOUR_SECTION", 0) == 0) in_section = true;
      continue;
    }
    if (upper(line) == "EOF") break;
    for (const auto& w : words(line)) {
      long v = 0;
      if (!parse_long(w, v)) throw ParseError("non-integer tour entry '" + w + "'", lineno);
      if (v == -1) return tour;
      if (v < 1) throw ParseError("tour ids start at 1", lineno);
      tour.push_back(static_cast<int>(v - 1));
    }
  }
  if (!in_section) throw ParseError("missing TOUR_SECTION", static_cast<int>(lines.size()));
  return tour;
}

ObjectiveValue evaluate_solution(const Instance& inst, const Solution& sol) {
  if (inst.index() != sol.index()) {
    throw FeasibilityError("solution type does not match the " +
                           std::string(to_string(kind_of(inst))) + " instance");
  }
  switch (kind_of(inst)) {
    case TaskKind::kTsp: {
      const auto& i = std::get<TspInstance>(inst);
      const auto& t = std::get<Tour>(sol);
      check_tour(i, t);
      return {tour_length(i, t.order), Direction::kMinimize};
    }
    case TaskKind::kBpp: {
      const auto& i = std::get<BppInstance>(inst);
      const auto& p = std::get<Packing>(sol);
      check_packing(i, p);
      return {static_cast<double>(bins_used(p.bin_of_item)), Direction::kMinimize};
    }
    case TaskKind::kMkp: {
      const auto& i = std::get<MkpInstance>(inst);
      const auto& s = std::get<Selection>(sol);
      check_selection(i, s);
      long total = 0;
      for (int item : s.items) total += i.values[item];
      return {static_cast<double>(total), Direction::kMaximize};
    }
    case TaskKind::kPfsp: {
      const auto& i = std::get<PfspInstance>(inst);
      const auto& s = std::get<Schedule>(sol);
      check_schedule(i, s);
      return {static_cast<double>(makespan(i, s.jobs)), Direction::kMinimize};
    }
  }
  throw ContractError("unknown task kind");
}

Reference reference_bound(const Instance& inst) {
  switch (kind_of(inst)) {
    case TaskKind::kTsp: {
      const auto& i = std::get<TspInstance>(inst);
      if (!i.reference) throw ReferenceUnavailableError("tsp instance '" + i.name + "' has no reference");
      return {*i.reference, ReferenceKind::kStored};
    }
    case TaskKind::kPfsp: {
      const auto& i = std::get<PfspInstance>(inst);
      if (!i.reference) throw ReferenceUnavailableError("pfsp instance '" + i.name + "' has no reference");
      return {*i.reference, ReferenceKind::kStored};
    }
    case TaskKind::kBpp: {
      const auto& i = std::get<BppInstance>(inst);
      return {static_cast<double>(l2_lower_bound(i.items, i.capacity)), ReferenceKind::kLowerBound};
    }
    case TaskKind::kMkp: {
      const auto& i = std::get<MkpInstance>(inst);
      if (i.reference) return {*i.reference, ReferenceKind::kStored};
      if (i.items() <= kMkpExactCutoff) {
        return {static_cast<double>(mkp_exact(i)), ReferenceKind::kExact};
      }
      return {mkp_surrogate_bound(i), ReferenceKind::kSurrogateUpperBound};
    }
  }
  throw ContractError("unknown task kind");
}

double instance_loss(const ObjectiveValue& obj, double reference) {
  return relative_gap(obj, reference) / 100.0;
}

std::vector<std::string> baseline_names(TaskKind kind) {
  switch (kind) {
    case TaskKind::kTsp: return {"nearest_neighbor"};
    case TaskKind::kBpp: return {"best_fit", "first_fit"};
    case TaskKind::kMkp: return {"greedy_density"};
    case TaskKind::kPfsp: return {"neh", "gupta"};
  }
  return {};
}

Solution run_baseline(TaskKind kind, std::string_view name, const Instance& inst) {
  if (kind_of(inst) != kind) throw ConfigError("instance does not belong to task");
  const auto names = baseline_names(kind);
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown baseline '" + std::string(name) + "' for " +
                      std::string(to_string(kind)));
  }
  switch (kind) {
    case TaskKind::kTsp:
      return Tour{nearest_neighbor_tour(std::get<TspInstance>(inst))};
    case TaskKind::kBpp: {
      const auto& i = std::get<BppInstance>(inst);
      return Packing{name == "best_fit" ? best_fit(i.items, i.capacity)
                                        : first_fit(i.items, i.capacity)};
    }
    case TaskKind::kMkp:
      return Selection{greedy_density(std::get<MkpInstance>(inst))};
    case TaskKind::kPfsp: {
      const auto& i = std::get<PfspInstance>(inst);
      return Schedule{name == "neh" ? neh(i) : gupta(i)};
    }
  }
  throw ConfigError("unknown task kind");
}

}  // namespace evoheur::tasks
