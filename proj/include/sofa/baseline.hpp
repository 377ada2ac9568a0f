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
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sofa/kmedians.hpp"
#include "sofa/sofa.hpp"
#include "sofa/sparse_vector.hpp"
#include "sofa/stream_io.hpp"

namespace sofa {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StaticOptions {
  // Upper bound on the total number of stored edges; 0 means unbounded.
  std::size_t max_edges = 0;
  KMediansOptions kmedians;
};

// The grouping step of static_sofa, shared by every theta. Throws
// BudgetExceeded when the rows hold more than options.max_edges edges.
Grouping static_grouping(std::span<const Record> records, std::size_t universe,
                         std::size_t k, const DistanceMetric& metric, std::uint64_t seed,
                         const StaticOptions& options = {});

// Offline reference: k-medians over every left row, exact per-group counts,
// ids kept when their count reaches theta * group size. Runs through the
// same grouping and thresholding code as the streaming postprocessing, with
// one weight-1 center per record and exact counters.
std::vector<IndexSet> static_sofa(std::span<const Record> records, std::size_t universe,
                                  std::size_t k, double theta,
                                  const DistanceMetric& metric, std::uint64_t seed,
                                  const StaticOptions& options = {});

// Algorithm R over one pass; the sample is returned in stream order.
std::vector<Record> reservoir_sample(StreamSource& stream, std::size_t size,
                                     std::uint64_t seed);

// Right clusters computed from an in-memory sample of rows.
using StaticAlgorithm =
    std::function<std::vector<IndexSet>(std::span<const Record> rows, std::size_t universe)>;

struct ReductionConfig {
  std::size_t sample_left = 0;   // rows kept by the reservoir
  std::size_t sample_right = 0;  // right ids handed to the static algorithm
  std::uint64_t seed = 0;
};

struct ReductionResult {
  std::vector<IndexSet> clusters;
  // Right ids seen in the sample, and the subset clustered directly.
  IndexSet touched;
  IndexSet core;
  std::size_t sample_rows = 0;
  std::size_t sample_edges = 0;
};

// Samples rows, keeps the sample_right highest-degree right ids (ties to the
// lower id), clusters the restricted sample, then gives every other sampled
// right id to the cluster whose mean sample-incidence vector is nearest in
// Euclidean distance (ties to the lower cluster).
ReductionResult rs_reduction(StreamSource& stream, const ReductionConfig& config,
                             const StaticAlgorithm& algorithm);

}  // namespace sofa
