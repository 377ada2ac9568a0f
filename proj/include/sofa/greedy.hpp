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
#include <span>
#include <vector>

#include "sofa/center.hpp"
#include "sofa/stream_io.hpp"

namespace sofa {

// Distance-threshold greedy clustering of the left stream.
//
// Each record either opens a new center (when every existing center is
// farther than `distance_threshold`) or is folded into its closest center:
// the center's weight grows by one and the record's neighbors enter the
// center's sketch with unit weight.
struct GreedyConfig {
  double distance_threshold = 0.0;
  std::size_t sketch_capacity = 1;
  DistanceMetric metric = DistanceMetric::symmetric();
};

// Consumes one pass of `stream`.
std::vector<WeightedCenter> greedy_pass(StreamSource& stream,
                                        const GreedyConfig& config);

// One right cluster per center: ids whose sketch estimate reaches
// theta * weight. Throws std::invalid_argument unless theta > 0.
std::vector<IndexSet> threshold_clusters(std::span<const WeightedCenter> centers,
                                         double theta);

// Parameters under which the greedy pass provably separates planted
// clusters: distance threshold 0.49 * k4 * s and rounding threshold 0.75 * p.
// k4 must satisfy k4 >= (2.02 / 0.98) * (1/2 + 2 * k1) for the noise
// constant k1; 2.1 covers k1 up to about 0.26.
struct TheoryParameters {
  double distance_threshold;
  double theta;
};

inline constexpr double kDefaultK4 = 2.1;

TheoryParameters theory_parameters(double p, std::size_t s, double k4 = kDefaultK4);

}  // namespace sofa
