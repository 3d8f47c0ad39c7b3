// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// CVT-MAP-Elites memory: behavior space [0,1]^dim is partitioned into the
// Voronoi cells of a fixed centroid set and each cell keeps its single best
// incumbent.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evoheur/core.hpp"

namespace evoheur::archive {

struct CentroidSet {
  int dim = 0;
  std::vector<std::vector<double>> centroids;
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(centroids.size()); }
};

struct CvtOptions {
  int samples = 10000;
  int iterations = 50;
};

// Fixed-iteration Lloyd k-means over seeded uniform samples. Deterministic
// for a given (dim, count, seed, options).
CentroidSet build_centroids(int dim, int count, std::uint64_t seed,
                            const CvtOptions& options = {});

// Index of the Euclidean-nearest centroid, lowest index on ties.
int assign_cell(std::span<const double> v, const CentroidSet& cs);

enum class InsertOutcome { kNewCell, kReplaced, kRejected };

const char* to_string(InsertOutcome outcome);

struct Exemplar {
  EvaluatedCandidate candidate;
  int cell_id = -1;
  std::string summary;
};

using ExemplarSet = std::vector<Exemplar>;

// First line of the strategy text, at most 200 characters.
std::string summarize(const Heuristic& h);

class Archive {
 public:
  Archive() = default;
  Archive(CentroidSet centroids, int capacity);

  const CentroidSet& centroids() const { return centroids_; }
  int capacity() const { return capacity_; }
  const std::map<int, EvaluatedCandidate>& cells() const { return cells_; }
  int occupied() const { return static_cast<int>(cells_.size()); }
  bool empty() const { return cells_.empty(); }

  // Places `c` by its normalized behavior. A new cell is filled, an
  // occupied one is taken only on strictly lower loss. When the archive
  // holds `capacity` incumbents and `c` lands in an empty cell, the worst
  // incumbent is evicted if `c` beats it, otherwise `c` is rejected.
  // Throws ContractError for an unevaluated candidate.
  InsertOutcome insert(const EvaluatedCandidate& c);

  // Reinstates an incumbent verbatim (snapshot restore).
  void restore_cell(int cell_id, EvaluatedCandidate c);

 private:
  CentroidSet centroids_;
  int capacity_ = 25;
  std::map<int, EvaluatedCandidate> cells_;
};

// Diversity-first retrieval: greedy farthest-point selection over occupied
// cells' centroids, seeded by the fittest incumbent. Falls back to the top
// population elites (cell -1) when the archive is empty.
ExemplarSet retrieve_exemplars(const Archive& a, const Population& p, int r);

// Occupied cells / total cells.
double coverage(const Archive& a);

}  // namespace evoheur::archive
