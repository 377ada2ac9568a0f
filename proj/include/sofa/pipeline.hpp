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
#include <optional>
#include <string>
#include <vector>

#include "sofa/baseline.hpp"
#include "sofa/greedy.hpp"
#include "sofa/sofa.hpp"
#include "sofa/stream_io.hpp"

namespace sofa {

enum class Algorithm { kSofa, kSofaAuto, kGreedy, kStatic, kRsStatic };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

// Records inspected when the degree scale s is estimated from the stream.
inline constexpr std::size_t kDegreePrefix = 10000;

struct RunOptions {
  Algorithm algorithm = Algorithm::kSofa;
  std::size_t k = 0;
  std::size_t cmax = 0;  // 0: 20 k
  std::optional<std::size_t> capacity;
  // Degree scale; estimated as the 99th percentile of the first
  // kDegreePrefix degrees when absent and needed.
  std::optional<std::size_t> s;
  // Defaults to 0.1 for the sofa variants and 1 (symmetric) otherwise.
  std::optional<double> alpha;
  // Empty selects kDefaultThetaGrid unless auto_theta is set.
  std::vector<double> thetas;
  bool auto_theta = false;
  LeftMode mode = LeftMode::kBicluster;
  // Per-center clusters without offline grouping, pruned to k after the
  // cover; BMF mode only.
  bool skip_grouping = false;
  std::uint64_t seed = 0;

  // Greedy: either theory mode (needs p) or an explicit distance threshold.
  bool theory_mode = false;
  std::optional<double> p;
  double k4 = kDefaultK4;
  std::optional<double> distance_threshold;

  StaticOptions static_options;
  std::size_t sample_left = 0;
  std::size_t sample_right = 0;  // 0: every sampled right id

  KMediansOptions kmedians;
  PhaseObserver observer;
};

struct RunReport {
  // One artifact per theta, in the order evaluated.
  std::vector<ClusteringArtifact> artifacts;
  std::vector<PhaseRecord> phases;
  std::optional<ThetaEstimate> theta_estimate;
  std::optional<std::size_t> s;
  std::size_t capacity = 0;
  std::size_t centers = 0;
  std::size_t peak_memory_entries = 0;
};

// Full two-pass run: right clusters from the first pass (or from the sample
// or the in-memory rows for the baselines), left clusters from the second.
// Throws std::invalid_argument on inconsistent options.
RunReport run_pipeline(StreamSource& stream, const RunOptions& options);

}  // namespace sofa
