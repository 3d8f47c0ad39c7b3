// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>
#include <numeric>

#include "evoheur/tasks.hpp"

namespace evoheur::tasks {
namespace {

// Fractional knapsack bound for constraint `c` over `order` (sorted by
// value/weight) with `room` capacity left.
double fractional_bound(const MkpInstance& inst, int c, std::span<const int> order,
                        long room) {
  double value = 0.0;
  for (int item : order) {
    const int w = inst.weights[c][item];
    if (w <= room) {
      room -= w;
      value += inst.values[item];
    } else {
      value += static_cast<double>(inst.values[item]) * static_cast<double>(room) / w;
      break;
    }
  }
  return value;
}

std::vector<int> ratio_order(const MkpInstance& inst, int c) {
  std::vector<int> order(inst.items());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    // v_a / w_a > v_b / w_b without division.
    return static_cast<long>(inst.values[a]) * inst.weights[c][b] >
           static_cast<long>(inst.values[b]) * inst.weights[c][a];
  });
  return order;
}

class BranchAndBound {
 public:
  explicit BranchAndBound(const MkpInstance& inst) : inst_(inst) {
    order_.resize(inst.items());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return mkp_item_density(inst, a) > mkp_item_density(inst, b);
    });
    position_.resize(inst.items());
    for (int i = 0; i < inst.items(); ++i) position_[order_[i]] = i;
    for (int c = 0; c < inst.constraints(); ++c) per_constraint_.push_back(ratio_order(inst, c));
    room_.assign(inst.capacities.begin(), inst.capacities.end());
    taken_.assign(inst.items(), 0);
  }

  long solve(std::vector<int>* best_items) {
    // Greedy incumbent.
    best_taken_.assign(inst_.items(), 0);
    for (int item : greedy_density(inst_)) {
      best_value_ += inst_.values[item];
      best_taken_[item] = 1;
    }
    dfs(0, 0);
    if (best_items) {
      best_items->clear();
      for (int i = 0; i < inst_.items(); ++i) {
        if (best_taken_[i]) best_items->push_back(i);
      }
    }
    return best_value_;
  }

 private:
  double bound(int depth, long value) const {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> rest;
    for (int c = 0; c < inst_.constraints(); ++c) {
      rest.clear();
      for (int item : per_constraint_[c]) {
        if (position_[item] >= depth) rest.push_back(item);
      }
      best = std::min(best, value + fractional_bound(inst_, c, rest, room_[c]));
    }
    return best;
  }

  void dfs(int depth, long value) {
    if (value > best_value_) {
      best_value_ = value;
      best_taken_ = taken_;
    }
    if (depth == inst_.items()) return;
    if (bound(depth, value) < static_cast<double>(best_value_) + 1.0 - 1e-9) return;

    const int item = order_[depth];
    bool fits = true;
    for (int c = 0; c < inst_.constraints(); ++c) {
      if (inst_.weights[c][item] > room_[c]) fits = false;
    }
    if (fits) {
      for (int c = 0; c < inst_.constraints(); ++c) room_[c] -= inst_.weights[c][item];
      taken_[item] = 1;
      dfs(depth + 1, value + inst_.values[item]);
      taken_[item] = 0;
      for (int c = 0; c < inst_.constraints(); ++c) room_[c] += inst_.weights[c][item];
    }
    dfs(depth + 1, value);
  }

  const MkpInstance& inst_;
  std::vector<int> order_;
  std::vector<int> position_;
  std::vector<std::vector<int>> per_constraint_;
  std::vector<long> room_;
  std::vector<char> taken_;
  std::vector<char> best_taken_;
  long best_value_ = 0;
};

}  // namespace

double mkp_item_density(const MkpInstance& inst, int item) {
  double norm_weight = 0.0;
  for (int c = 0; c < inst.constraints(); ++c) {
    norm_weight += static_cast<double>(inst.weights[c][item]) / inst.capacities[c];
  }
  return norm_weight > 0.0 ? inst.values[item] / norm_weight
                           : std::numeric_limits<double>::infinity();
}

std::vector<int> greedy_density(const MkpInstance& inst) {
  std::vector<int> order(inst.items());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return mkp_item_density(inst, a) > mkp_item_density(inst, b);
  });
  std::vector<long> room(inst.capacities.begin(), inst.capacities.end());
  std::vector<int> chosen;
  for (int item : order) {
    bool fits = true;
    for (int c = 0; c < inst.constraints(); ++c) {
      if (inst.weights[c][item] > room[c]) fits = false;
    }
    if (!fits) continue;
    for (int c = 0; c < inst.constraints(); ++c) room[c] -= inst.weights[c][item];
    chosen.push_back(item);
  }
  return chosen;
}

long mkp_exact(const MkpInstance& inst, std::vector<int>* best_items) {
  return BranchAndBound(inst).solve(best_items);
}

double mkp_surrogate_bound(const MkpInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < inst.constraints(); ++c) {
    best = std::min(best, fractional_bound(inst, c, ratio_order(inst, c), inst.capacities[c]));
  }
  return best;
}

}  // namespace evoheur::tasks
