// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// The four problem environments: instances, feasibility-checked objective
// evaluation, reference values, classical baselines and exact oracles for
// small instances.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evoheur/core.hpp"
#include "evoheur/errors.hpp"

namespace evoheur::tasks {

enum class TaskKind { kTsp, kBpp, kMkp, kPfsp };

// Wire names: tsp_construct, bpp_online, mkp, pfsp.
std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);  // throws ConfigError
Direction direction(TaskKind kind);

enum class DistanceRule {
  kRoundedEuclidean,  // TSPLIB EUC_2D nint
  kExactEuclidean,
};

struct TspInstance {
  std::string name;
  std::vector<std::array<double, 2>> coords;
  DistanceRule rule = DistanceRule::kExactEuclidean;
  std::optional<double> reference;

  int size() const { return static_cast<int>(coords.size()); }
  double distance(int a, int b) const;
};

struct BppInstance {
  std::string name;
  int capacity = 100;
  std::vector<int> items;
};

struct MkpInstance {
  std::string name;
  std::vector<int> values;
  std::vector<std::vector<int>> weights;  // constraints x items
  std::vector<int> capacities;
  std::optional<double> reference;

  int items() const { return static_cast<int>(values.size()); }
  int constraints() const { return static_cast<int>(capacities.size()); }
};

struct PfspInstance {
  std::string name;
  std::vector<std::vector<int>> ptimes;  // jobs x machines
  std::optional<double> reference;

  int jobs() const { return static_cast<int>(ptimes.size()); }
  int machines() const { return ptimes.empty() ? 0 : static_cast<int>(ptimes.front().size()); }
};

using Instance = std::variant<TspInstance, BppInstance, MkpInstance, PfspInstance>;

TaskKind kind_of(const Instance& inst);
const std::string& name_of(const Instance& inst);

struct Tour {
  std::vector<int> order;
};
struct Packing {
  std::vector<int> bin_of_item;
};
struct Selection {
  std::vector<int> items;
};
struct Schedule {
  std::vector<int> jobs;
};

using Solution = std::variant<Tour, Packing, Selection, Schedule>;

struct GeneratorParams {
  int size = 0;         // cities, items or jobs
  int capacity = 100;   // bpp bin capacity
  int constraints = 0;  // mkp
  int machines = 0;     // pfsp
};

// Deterministic for fixed (kind, params, seed). Throws ConfigError.
Instance generate_instance(TaskKind kind, const GeneratorParams& params, std::uint64_t seed);

// TSPLIB EUC_2D or Taillard text. Throws ParseError (with line) or
// ConfigError for kinds without a text format.
Instance parse_instance(TaskKind kind, std::string_view text, std::string name = "");

// TSPLIB TOUR_SECTION, 0-based city indices.
std::vector<int> parse_tsplib_tour(std::string_view text);

// Throws FeasibilityError naming the violated constraint.
ObjectiveValue evaluate_solution(const Instance& inst, const Solution& sol);

enum class ReferenceKind { kStored, kExact, kLowerBound, kSurrogateUpperBound };

std::string_view to_string(ReferenceKind kind);

struct Reference {
  double value = 0.0;
  ReferenceKind kind = ReferenceKind::kStored;
};

// Largest MKP instance solved exactly by reference_bound.
inline constexpr int kMkpExactCutoff = 22;

// Stored reference (TSP/PFSP, else ReferenceUnavailableError), L2 bound
// (BPP), exact optimum or surrogate upper bound (MKP).
Reference reference_bound(const Instance& inst);

// Per-instance loss: relative gap as a fraction.
double instance_loss(const ObjectiveValue& obj, double reference);

// Martello-Toth L2 lower bound on the number of bins.
int l2_lower_bound(std::span<const int> items, int capacity);

// nearest_neighbor | best_fit | first_fit | neh | gupta | greedy_density.
// Throws ConfigError for a name that does not belong to the task.
Solution run_baseline(TaskKind kind, std::string_view name, const Instance& inst);
std::vector<std::string> baseline_names(TaskKind kind);

// Building blocks shared with oracles and the CLI.
double tour_length(const TspInstance& inst, std::span<const int> order);
std::vector<int> nearest_neighbor_tour(const TspInstance& inst);
// Held-Karp; throws ConfigError above 16 cities.
double tsp_exact_length(const TspInstance& inst);
// Nearest neighbour followed by 2-opt until no improving move remains.
double tsp_two_opt_length(const TspInstance& inst);

std::vector<int> best_fit(std::span<const int> items, int capacity);
std::vector<int> first_fit(std::span<const int> items, int capacity);
int bins_used(std::span<const int> bin_of_item);

int makespan(const PfspInstance& inst, std::span<const int> sequence);
std::vector<int> neh(const PfspInstance& inst);
std::vector<int> gupta(const PfspInstance& inst);
double gupta_index(const PfspInstance& inst, int job);
// Exhaustive over all permutations; throws ConfigError above 9 jobs.
int pfsp_exact_makespan(const PfspInstance& inst);

std::vector<int> greedy_density(const MkpInstance& inst);
double mkp_item_density(const MkpInstance& inst, int item);
// Depth-first branch and bound; returns the optimal value.
long mkp_exact(const MkpInstance& inst, std::vector<int>* best_items = nullptr);
// min over constraints of the single-constraint fractional knapsack bound.
double mkp_surrogate_bound(const MkpInstance& inst);

}  // namespace evoheur::tasks
