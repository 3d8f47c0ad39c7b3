// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>
#include <numeric>

#include "evoheur/tasks.hpp"

namespace evoheur::tasks {
namespace {

int total_work(const PfspInstance& inst, int job) {
  return std::accumulate(inst.ptimes[job].begin(), inst.ptimes[job].end(), 0);
}

}  // namespace

int makespan(const PfspInstance& inst, std::span<const int> sequence) {
  const int m = inst.machines();
  std::vector<int> completion(m, 0);
  for (int job : sequence) {
    const auto& p = inst.ptimes[job];
    completion[0] += p[0];
    for (int k = 1; k < m; ++k) {
      completion[k] = std::max(completion[k], completion[k - 1]) + p[k];
    }
  }
  return m == 0 ? 0 : completion[m - 1];
}

// NEH with Taillard's acceleration: for a partial sequence of length l the
// makespan after inserting a job at position i is
//   max_k (f[i][k] + q[i][k]),
// with e the heads, q the tails and f the completion of the inserted job.
std::vector<int> neh(const PfspInstance& inst) {
  const int n = inst.jobs();
  const int m = inst.machines();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return total_work(inst, a) > total_work(inst, b);
  });
  if (n == 0) return {};

  std::vector<int> seq{order[0]};
  for (int idx = 1; idx < n; ++idx) {
    const int job = order[idx];
    const int l = static_cast<int>(seq.size());
    std::vector<std::vector<int>> e(l + 1, std::vector<int>(m + 1, 0));
    std::vector<std::vector<int>> q(l + 2, std::vector<int>(m + 2, 0));
    for (int i = 1; i <= l; ++i) {
      for (int k = 1; k <= m; ++k) {
        e[i][k] = std::max(e[i - 1][k], e[i][k - 1]) + inst.ptimes[seq[i - 1]][k - 1];
      }
    }
    for (int i = l; i >= 1; --i) {
      for (int k = m; k >= 1; --k) {
        q[i][k] = std::max(q[i + 1][k], q[i][k + 1]) + inst.ptimes[seq[i - 1]][k - 1];
      }
    }
    int best_pos = 0;
    int best_val = std::numeric_limits<int>::max();
    for (int pos = 0; pos <= l; ++pos) {
      // Insert before seq[pos] (0-based); heads come from row pos, tails from pos+1.
      std::vector<int> f(m + 1, 0);
      int val = 0;
      for (int k = 1; k <= m; ++k) {
        f[k] = std::max(f[k - 1], e[pos][k]) + inst.ptimes[job][k - 1];
        val = std::max(val, f[k] + q[pos + 1][k]);
      }
      if (val < best_val) {
        best_val = val;
        best_pos = pos;
      }
    }
    seq.insert(seq.begin() + best_pos, job);
  }
  return seq;
}

double gupta_index(const PfspInstance& inst, int job) {
  const auto& p = inst.ptimes[job];
  const int m = static_cast<int>(p.size());
  const double sign = p.front() < p.back() ? 1.0 : -1.0;
  int denom = std::numeric_limits<int>::max();
  if (m == 1) {
    denom = p[0];
  } else {
    for (int k = 0; k + 1 < m; ++k) denom = std::min(denom, p[k] + p[k + 1]);
  }
  return sign / static_cast<double>(denom);
}

std::vector<int> gupta(const PfspInstance& inst) {
  std::vector<int> order(inst.jobs());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return gupta_index(inst, a) > gupta_index(inst, b);
  });
  return order;
}

int pfsp_exact_makespan(const PfspInstance& inst) {
  if (inst.jobs() > 9) throw ConfigError("pfsp_exact_makespan: at most 9 jobs");
  std::vector<int> perm(inst.jobs());
  std::iota(perm.begin(), perm.end(), 0);
  int best = std::numeric_limits<int>::max();
  do {
    best = std::min(best, makespan(inst, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace evoheur::tasks
