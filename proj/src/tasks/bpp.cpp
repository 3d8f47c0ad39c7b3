// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>
#include <set>

#include "evoheur/tasks.hpp"

namespace evoheur::tasks {

std::vector<int> best_fit(std::span<const int> items, int capacity) {
  std::vector<int> residual;
  std::vector<int> assignment;
  assignment.reserve(items.size());
  for (int item : items) {
    int best = -1;
    for (int b = 0; b < static_cast<int>(residual.size()); ++b) {
      if (residual[b] >= item && (best < 0 || residual[b] < residual[best])) best = b;
    }
    if (best < 0) {
      best = static_cast<int>(residual.size());
      residual.push_back(capacity);
    }
    residual[best] -= item;
    assignment.push_back(best);
  }
  return assignment;
}

std::vector<int> first_fit(std::span<const int> items, int capacity) {
  std::vector<int> residual;
  std::vector<int> assignment;
  assignment.reserve(items.size());
  for (int item : items) {
    int chosen = -1;
    for (int b = 0; b < static_cast<int>(residual.size()); ++b) {
      if (residual[b] >= item) {
        chosen = b;
        break;
      }
    }
    if (chosen < 0) {
      chosen = static_cast<int>(residual.size());
      residual.push_back(capacity);
    }
    residual[chosen] -= item;
    assignment.push_back(chosen);
  }
  return assignment;
}

int bins_used(std::span<const int> bin_of_item) {
  if (bin_of_item.empty()) return 0;
  return *std::max_element(bin_of_item.begin(), bin_of_item.end()) + 1;
}

int l2_lower_bound(std::span<const int> items, int capacity) {
  if (items.empty()) return 0;
  const long total = std::accumulate(items.begin(), items.end(), 0L);
  long best = (total + capacity - 1) / capacity;

  std::set<int> thresholds{0};
  for (int s : items) {
    if (2 * s <= capacity) thresholds.insert(s);
  }
  for (int alpha : thresholds) {
    long n1 = 0, n2 = 0, sum2 = 0, sum3 = 0;
    for (int s : items) {
      if (s > capacity - alpha) {
        ++n1;
      } else if (2 * s > capacity) {
        ++n2;
        sum2 += s;
      } else if (s >= alpha) {
        sum3 += s;
      }
    }
    const long slack2 = n2 * capacity - sum2;
    const long excess = sum3 - slack2;
    const long extra = excess > 0 ? (excess + capacity - 1) / capacity : 0;
    best = std::max(best, n1 + n2 + extra);
  }
  return static_cast<int>(best);
}

}  // namespace evoheur::tasks
