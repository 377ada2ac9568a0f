// Copyright 2026 The Sofa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sofa/sparse_vector.hpp"

namespace sofa {

struct KMediansOptions {
  // A swap is taken only if it lowers the cost below (1 - this) * cost.
  double min_relative_improvement = 1e-3;
  // Swap-in candidates examined per sweep, in seeded random order;
  // 0 examines every non-medoid.
  std::size_t max_candidates_per_sweep = 0;
};

struct KMediansResult {
  // Point indices of the medoids, ascending. min(k, |points|) entries.
  std::vector<std::size_t> medoids;
  // Group of every point; group g is served by medoids[g].
  std::vector<std::uint32_t> assignment;
  // Exactly k groups; groups beyond the medoid count are empty.
  std::vector<std::vector<std::size_t>> groups;
  double cost = 0.0;
  std::size_t swaps = 0;
};

// Weighted k-medians with medoids drawn from the input points.
//
// Starts from a greedy farthest-point seeding (first medoid drawn from
// `seed`), then applies improving single swaps until none improves the cost
// by the configured relative margin. Distances are asym_hamming(medoid,
// point); each point goes to its nearest medoid, ties to the lowest medoid.
// With k >= |points| every point is its own medoid.
KMediansResult kmedians_local_search(std::span<const SparseBinaryVector> points,
                                     std::span<const double> weights,
                                     std::size_t k, const DistanceMetric& metric,
                                     std::uint64_t seed,
                                     const KMediansOptions& options = {});

// Weighted cost of serving every point by its nearest medoid.
double kmedians_cost(std::span<const SparseBinaryVector> points,
                     std::span<const double> weights,
                     std::span<const std::size_t> medoids,
                     const DistanceMetric& metric);

}  // namespace sofa
