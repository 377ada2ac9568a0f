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
#include <string>
#include <vector>

#include "sofa/center.hpp"
#include "sofa/kmedians.hpp"
#include "sofa/stream_io.hpp"

namespace sofa {

inline constexpr double kDefaultAlpha = 0.1;
inline constexpr std::size_t kDefaultCentersPerCluster = 20;
inline constexpr std::size_t kDefaultMaxPhases = 64;

struct SofaConfig {
  std::size_t k = 1;
  // Center budget; 0 selects kDefaultCentersPerCluster * k.
  std::size_t cmax = 0;
  std::size_t sketch_capacity = 1;
  DistanceMetric metric{kDefaultAlpha};
  std::uint64_t seed = 0;
  // Diagnostic ceiling on restarts.
  std::size_t max_phases = kDefaultMaxPhases;
  KMediansOptions kmedians;

  std::size_t center_budget() const {
    return cmax == 0 ? kDefaultCentersPerCluster * k : cmax;
  }
  // Throws std::invalid_argument unless center_budget() > k >= 1 and the
  // sketch capacity is positive.
  void validate() const;
};

// Sketch capacity max(3s, 0.05n), at least 1.
std::size_t default_sketch_capacity(std::size_t s, std::size_t universe);

// State at the end of one phase of the streaming pass.
struct PhaseRecord {
  std::size_t phase = 0;
  double lower_bound = 0.0;
  double cost = 0.0;
  std::size_t centers = 0;
  // Original stream records read so far.
  std::size_t records_consumed = 0;
  // Weight held by centers plus pending restart items; equals
  // records_consumed at every phase boundary.
  std::uint64_t total_weight = 0;
  // True when the phase ended by raising the restart flag.
  bool restarted = false;
};

// One line of line-delimited JSON telemetry.
std::string format_phase_record(const PhaseRecord& record);

struct SofaResult {
  std::vector<WeightedCenter> centers;
  std::vector<PhaseRecord> phases;
  std::size_t records = 0;
  std::size_t peak_centers = 0;
  // Peak of vector entries plus live sketch counters over every retained
  // center and pending restart item.
  std::size_t peak_memory_entries = 0;
};

using PhaseObserver = std::function<void(const PhaseRecord&)>;

// One pass of importance-sampling streaming k-medians with per-center
// sketches.
//
// Each item u of weight w(u) (1 for stream records) is opened as a center
// with probability min(w(u) * d / f, 1), where d is the distance to the
// nearest center (infinite when there is none) and f = LB / (k (1 + lg n)).
// Otherwise it is folded into its nearest center: cost += w(u) * d, the
// center's weight grows by w(u), and the sketches merge. When the center
// budget is reached or cost > 2 LB, LB doubles and a new phase replays the
// current centers (in insertion order, weights kept) followed by the unread
// rest of the stream. Each phase starts from cost 0.
//
// Throws std::runtime_error after config.max_phases phases.
SofaResult sofa_pass(StreamSource& stream, const SofaConfig& config,
                     const PhaseObserver& observer = {});

// A group of centers after offline clustering.
struct CenterGroup {
  MGSketch sketch{1};
  std::uint64_t weight = 0;
  std::vector<std::size_t> members;
};

struct Grouping {
  std::vector<CenterGroup> groups;  // exactly k
  // Set when there were fewer centers than k; the tail groups are empty.
  bool underfull = false;
};

// Weighted k-medians over the center vectors; each group merges its
// members' sketches and sums their weights. Throws on an empty input.
Grouping group_centers(std::span<const WeightedCenter> centers,
                       const SofaConfig& config);

// Ids whose merged estimate reaches theta * group weight. Empty groups give
// empty clusters.
std::vector<IndexSet> threshold_groups(std::span<const CenterGroup> groups,
                                       double theta);

std::vector<IndexSet> sofa_postprocess(std::span<const WeightedCenter> centers,
                                       const SofaConfig& config, double theta);

struct ThetaClusters {
  double theta;
  std::vector<IndexSet> clusters;
};

// One grouping shared by every theta.
std::vector<ThetaClusters> multi_threshold(std::span<const WeightedCenter> centers,
                                           const SofaConfig& config,
                                           std::span<const double> thetas);

inline const std::vector<double> kDefaultThetaGrid = {0.3, 0.4, 0.5, 0.6, 0.7};

struct ThetaEstimate {
  double theta = 0.5;
  double p_hat = 0.0;
  double q_hat = 0.0;
  double log_likelihood = 0.0;
  // Too few live counters to fit; theta is the 0.5 fallback.
  bool fallback = true;
};

// {0.05, 0.10, ..., 0.95}.
std::vector<double> default_probability_grid();

// Fits a two-class Binomial model to the live counters. For each grid pair
// q < p, every counter c of a group with weight W is scored as the better of
// Binomial(W, p) and Binomial(W, q); the best-scoring pair determines theta
// as the point where the two likelihoods cross,
//   theta = log((1-q)/(1-p)) / (log(p/q) + log((1-q)/(1-p))).
// Ties keep the smaller p, then the smaller q.
ThetaEstimate estimate_theta(std::span<const CenterGroup> groups,
                             std::span<const double> grid);
ThetaEstimate estimate_theta(std::span<const CenterGroup> groups);

}  // namespace sofa
