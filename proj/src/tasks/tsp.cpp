// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "evoheur/tasks.hpp"

namespace evoheur::tasks {

double TspInstance::distance(int a, int b) const {
  const double dx = coords[a][0] - coords[b][0];
  const double dy = coords[a][1] - coords[b][1];
  const double d = std::sqrt(dx * dx + dy * dy);
  if (rule == DistanceRule::kRoundedEuclidean) {
    return static_cast<double>(static_cast<long>(d + 0.5));
  }
  return d;
}

double tour_length(const TspInstance& inst, std::span<const int> order) {
  double len = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    len += inst.distance(order[i], order[(i + 1) % order.size()]);
  }
  return len;
}

std::vector<int> nearest_neighbor_tour(const TspInstance& inst) {
  const int n = inst.size();
  std::vector<int> tour{0};
  std::vector<char> visited(n, 0);
  if (n == 0) return {};
  visited[0] = 1;
  int current = 0;
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (visited[j]) continue;
      const double d = inst.distance(current, j);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    visited[best] = 1;
    tour.push_back(best);
    current = best;
  }
  return tour;
}

double tsp_exact_length(const TspInstance& inst) {
  const int n = inst.size();
  if (n > 16) throw ConfigError("tsp_exact_length: at most 16 cities");
  if (n <= 1) return 0.0;
  // dp[mask][j]: shortest path from city 0 through `mask` (over cities
  // 1..n-1) ending at j.
  const int m = n - 1;
  const std::size_t full = std::size_t{1} << m;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full * m, inf);
  for (int j = 0; j < m; ++j) dp[(std::size_t{1} << j) * m + j] = inst.distance(0, j + 1);
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int j = 0; j < m; ++j) {
      const double cur = dp[mask * m + j];
      if (!(mask >> j & 1) || cur == inf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask >> k & 1) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        const double cand = cur + inst.distance(j + 1, k + 1);
        if (cand < dp[next * m + k]) dp[next * m + k] = cand;
      }
    }
  }
  double best = inf;
  for (int j = 0; j < m; ++j) {
    best = std::min(best, dp[(full - 1) * m + j] + inst.distance(j + 1, 0));
  }
  return best;
}

double tsp_two_opt_length(const TspInstance& inst) {
  std::vector<int> tour = nearest_neighbor_tour(inst);
  const int n = static_cast<int>(tour.size());
  if (n < 4) return tour_length(inst, tour);
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const int a = tour[i], b = tour[i + 1], c = tour[j], d = tour[(j + 1) % n];
        const double delta = inst.distance(a, c) + inst.distance(b, d) -
                             inst.distance(a, b) - inst.distance(c, d);
        if (delta < -1e-10) {
          std::reverse(tour.begin() + i + 1, tour.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
  return tour_length(inst, tour);
}

}  // namespace evoheur::tasks
