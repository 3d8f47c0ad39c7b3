// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/archive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evoheur/errors.hpp"
#include "evoheur/rng.hpp"

namespace evoheur::archive {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

int nearest(std::span<const double> v, const std::vector<std::vector<double>>& cs,
            double* dist_out = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const double d = squared_distance(v, cs[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

}  // namespace

CentroidSet build_centroids(int dim, int count, std::uint64_t seed,
                            const CvtOptions& options) {
  if (dim < 1 || count < 1) {
    throw ConfigError("build_centroids: dim and count must be >= 1");
  }
  if (count > options.samples) {
    throw ConfigError("build_centroids: more centroids than samples");
  }
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(options.samples);
  const auto d = static_cast<std::size_t>(dim);
  std::vector<std::vector<double>> samples(n, std::vector<double>(d));
  for (auto& s : samples) {
    for (auto& x : s) x = rng.uniform01();
  }

  std::vector<std::vector<double>> centroids(samples.begin(),
                                             samples.begin() + count);
  std::vector<int> label(n, 0);
  std::vector<double> dist(n, 0.0);
  for (int it = 0; it < options.iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      label[i] = nearest(samples[i], centroids, &dist[i]);
    }
    std::vector<std::vector<double>> sums(count, std::vector<double>(d, 0.0));
    std::vector<int> members(count, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& acc = sums[label[i]];
      for (std::size_t j = 0; j < d; ++j) acc[j] += samples[i][j];
      ++members[label[i]];
    }
    std::vector<char> taken(n, 0);
    for (int c = 0; c < count; ++c) {
      if (members[c] > 0) {
        for (std::size_t j = 0; j < d; ++j) centroids[c][j] = sums[c][j] / members[c];
        continue;
      }
      // Empty cluster: move it onto the sample farthest from its centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      taken[far] = 1;
      dist[far] = 0.0;
      centroids[c] = samples[far];
    }
  }
  for (auto& c : centroids) {
    for (auto& x : c) x = std::clamp(x, 0.0, 1.0);
  }
  return CentroidSet{dim, std::move(centroids), seed};
}

int assign_cell(std::span<const double> v, const CentroidSet& cs) {
  if (static_cast<int>(v.size()) != cs.dim) {
    throw DomainError("assign_cell: vector has dimension " +
                      std::to_string(v.size()) + ", centroids have " +
                      std::to_string(cs.dim));
  }
  if (cs.centroids.empty()) throw DomainError("assign_cell: empty centroid set");
  return nearest(v, cs.centroids);
}

const char* to_string(InsertOutcome outcome) {
  switch (outcome) {
    case InsertOutcome::kNewCell:
      return "new_cell";
    case InsertOutcome::kReplaced:
      return "replaced";
    case InsertOutcome::kRejected:
      return "rejected";
  }
  return "unknown";
}

std::string summarize(const Heuristic& h) {
  std::string line = h.strategy_text.substr(0, h.strategy_text.find('\n'));
  if (line.size() > 200) line.resize(200);
  return line;
}

Archive::Archive(CentroidSet centroids, int capacity)
    : centroids_(std::move(centroids)), capacity_(capacity) {
  if (capacity_ < 1) throw ConfigError("archive capacity must be >= 1");
}

InsertOutcome Archive::insert(const EvaluatedCandidate& c) {
  if (!c.evaluated()) {
    throw ContractError("archive insert: candidate '" + c.heuristic.id +
                        "' is not evaluated");
  }
  const int cell = assign_cell(c.behavior_norm, centroids_);
  auto it = cells_.find(cell);
  if (it != cells_.end()) {
    if (c.loss() < it->second.loss()) {
      it->second = c;
      return InsertOutcome::kReplaced;
    }
    return InsertOutcome::kRejected;
  }
  if (occupied() >= capacity_) {
    auto worst = std::max_element(
        cells_.begin(), cells_.end(),
        [](const auto& a, const auto& b) { return fitter(a.second, b.second); });
    if (!(c.loss() < worst->second.loss())) return InsertOutcome::kRejected;
    cells_.erase(worst);
  }
  cells_.emplace(cell, c);
  return InsertOutcome::kNewCell;
}

void Archive::restore_cell(int cell_id, EvaluatedCandidate c) {
  if (cell_id < 0 || cell_id >= centroids_.count()) {
    throw ContractError("restore_cell: cell id out of range");
  }
  cells_[cell_id] = std::move(c);
}

ExemplarSet retrieve_exemplars(const Archive& a, const Population& p, int r) {
  ExemplarSet out;
  if (r <= 0) return out;

  if (a.empty()) {
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(r), p.members.size());
    std::vector<EvaluatedCandidate> elites = p.members;
    std::stable_sort(elites.begin(), elites.end(), fitter);
    for (std::size_t i = 0; i < take; ++i) {
      out.push_back({elites[i], -1, summarize(elites[i].heuristic)});
    }
    return out;
  }

  std::vector<int> pool;
  for (const auto& [cell, _] : a.cells()) pool.push_back(cell);
  const auto& cents = a.centroids().centroids;
  const auto& cells = a.cells();

  // Seed with the fittest incumbent.
  int first = pool.front();
  for (int cell : pool) {
    if (fitter(cells.at(cell), cells.at(first))) first = cell;
  }
  std::vector<int> picked{first};
  std::vector<double> min_dist(cents.size(), std::numeric_limits<double>::infinity());

  while (static_cast<int>(picked.size()) < r && picked.size() < pool.size()) {
    const int last = picked.back();
    int best = -1;
    for (int cell : pool) {
      if (std::find(picked.begin(), picked.end(), cell) != picked.end()) continue;
      min_dist[cell] = std::min(min_dist[cell], squared_distance(cents[cell], cents[last]));
      if (best < 0 || min_dist[cell] > min_dist[best] ||
          (min_dist[cell] == min_dist[best] && fitter(cells.at(cell), cells.at(best)))) {
        best = cell;
      }
    }
    picked.push_back(best);
  }

  for (int cell : picked) {
    const auto& inc = cells.at(cell);
    out.push_back({inc, cell, summarize(inc.heuristic)});
  }
  return out;
}

double coverage(const Archive& a) {
  const int total = a.centroids().count();
  if (total == 0) return 0.0;
  return static_cast<double>(a.occupied()) / total;
}

}  // namespace evoheur::archive
