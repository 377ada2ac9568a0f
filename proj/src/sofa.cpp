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

#include "sofa/sofa.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "sofa/rng.hpp"

namespace sofa {

void SofaConfig::validate() const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (center_budget() <= k) {
    throw std::invalid_argument("center budget must exceed k");
  }
  if (sketch_capacity == 0) {
    throw std::invalid_argument("sketch capacity must be positive");
  }
  if (max_phases == 0) throw std::invalid_argument("max_phases must be positive");
}

std::size_t default_sketch_capacity(std::size_t s, std::size_t universe) {
  const auto fraction = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(universe)));
  return std::max<std::size_t>({3 * s, fraction, 1});
}

std::string format_phase_record(const PhaseRecord& record) {
  nlohmann::ordered_json j;
  j["phase"] = record.phase;
  j["lower_bound"] = record.lower_bound;
  j["cost"] = record.cost;
  j["centers"] = record.centers;
  j["records_consumed"] = record.records_consumed;
  j["total_weight"] = record.total_weight;
  j["restarted"] = record.restarted;
  return j.dump();
}

namespace {

// Running total of retained entries with its high-water mark.
class MemoryMeter {
 public:
  void add(std::size_t n) {
    current_ += n;
    peak_ = std::max(peak_, current_);
  }
  void remove(std::size_t n) { current_ -= n; }
  std::size_t peak() const { return peak_; }

 private:
  std::size_t current_ = 0;
  std::size_t peak_ = 0;
};

}  // namespace

SofaResult sofa_pass(StreamSource& stream, const SofaConfig& config,
                     const PhaseObserver& observer) {
  config.validate();
  const std::size_t n = stream.universe();
  const std::size_t budget = config.center_budget();
  const double log_term = 1.0 + std::log2(static_cast<double>(std::max<std::size_t>(n, 1)));

  SofaResult result;
  MemoryMeter memory;
  CenterSet centers(n, config.metric);
  std::deque<WeightedCenter> pending;
  double lower_bound = 1.0;
  bool source_done = false;
  Record record;

  stream.begin_pass();
  for (std::size_t phase = 0;; ++phase) {
    if (phase >= config.max_phases) {
      throw std::runtime_error("streaming pass exceeded " +
                               std::to_string(config.max_phases) +
                               " phases (lower bound " + std::to_string(lower_bound) + ")");
    }
    const double facility_cost = lower_bound / (static_cast<double>(config.k) * log_term);
    double cost = 0.0;
    bool restart = false;
    std::uint64_t position = 0;

    while (!restart) {
      WeightedCenter item;
      bool fresh = false;
      if (!pending.empty()) {
        item = std::move(pending.front());
        pending.pop_front();
      } else if (!source_done && stream.next(record)) {
        ++result.records;
        fresh = true;
        // Fresh records carry no sketch until they open a center.
        item.vector = std::move(record.row);
        item.weight = 1;
        memory.add(item.vector.size());
      } else {
        source_done = true;
        break;
      }

      const NearestResult near = centers.nearest(item.vector);
      const double w = static_cast<double>(item.weight);
      const double open_probability =
          near.index ? std::min(w * near.distance / facility_cost, 1.0) : 1.0;
      const double u = counter_uniform(config.seed, phase, position++);

      if (u < open_probability) {
        if (fresh) {
          item = make_center(std::move(item.vector), config.sketch_capacity, 0);
          memory.add(item.sketch.size());
        }
        centers.add(std::move(item));
      } else {
        WeightedCenter& target = centers[*near.index];
        cost += w * near.distance;
        target.weight += item.weight;
        const std::size_t before = target.sketch.size();
        if (fresh) {
          target.sketch.insert_all(item.vector);
        } else {
          target.sketch.merge(item.sketch);
        }
        memory.add(target.sketch.size());
        memory.remove(before + item.logical_entries());
      }
      result.peak_centers = std::max(result.peak_centers, centers.size());
      restart = centers.size() >= budget || cost > 2.0 * lower_bound;
    }

    PhaseRecord summary;
    summary.phase = phase;
    summary.lower_bound = lower_bound;
    summary.cost = cost;
    summary.centers = centers.size();
    summary.records_consumed = result.records;
    for (const auto& c : centers.centers()) summary.total_weight += c.weight;
    for (const auto& c : pending) summary.total_weight += c.weight;
    summary.restarted = restart;
    if (summary.total_weight != summary.records_consumed) {
      throw std::logic_error("center weights do not account for every record");
    }
    result.phases.push_back(summary);
    if (observer) observer(summary);
    if (!restart) break;

    // Replay the current centers ahead of the unprocessed restart items.
    std::vector<WeightedCenter> replay = centers.release();
    pending.insert(pending.begin(), std::make_move_iterator(replay.begin()),
                   std::make_move_iterator(replay.end()));
    lower_bound *= 2.0;
  }

  result.centers = centers.release();
  result.peak_memory_entries = memory.peak();
  return result;
}

Grouping group_centers(std::span<const WeightedCenter> centers,
                       const SofaConfig& config) {
  if (centers.empty()) throw std::invalid_argument("no centers to group");
  std::vector<SparseBinaryVector> points;
  std::vector<double> weights;
  points.reserve(centers.size());
  weights.reserve(centers.size());
  for (const auto& c : centers) {
    points.push_back(c.vector);
    weights.push_back(static_cast<double>(c.weight));
  }
  const KMediansResult km = kmedians_local_search(points, weights, config.k, config.metric,
                                                  config.seed, config.kmedians);
  Grouping out;
  out.underfull = centers.size() < config.k;
  out.groups.resize(config.k);
  const std::size_t capacity = centers.front().sketch.capacity();
  for (std::size_t g = 0; g < config.k; ++g) {
    CenterGroup& group = out.groups[g];
    group.sketch = MGSketch(capacity);
    group.members = km.groups[g];
    for (std::size_t member : group.members) {
      group.weight += centers[member].weight;
      group.sketch.merge(centers[member].sketch);
    }
  }
  return out;
}

std::vector<IndexSet> threshold_groups(std::span<const CenterGroup> groups,
                                       double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  std::vector<IndexSet> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.weight == 0) {
      out.emplace_back();
    } else {
      out.push_back(heavy_items(g.sketch, theta * static_cast<double>(g.weight)));
    }
  }
  return out;
}

std::vector<IndexSet> sofa_postprocess(std::span<const WeightedCenter> centers,
                                       const SofaConfig& config, double theta) {
  return threshold_groups(group_centers(centers, config).groups, theta);
}

std::vector<ThetaClusters> multi_threshold(std::span<const WeightedCenter> centers,
                                           const SofaConfig& config,
                                           std::span<const double> thetas) {
  const Grouping grouping = group_centers(centers, config);
  std::vector<ThetaClusters> out;
  out.reserve(thetas.size());
  for (double theta : thetas) {
    out.push_back({theta, threshold_groups(grouping.groups, theta)});
  }
  return out;
}

std::vector<double> default_probability_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

namespace {

struct Counter {
  double count;
  double trials;
  double log_choose;
};

}  // namespace

ThetaEstimate estimate_theta(std::span<const CenterGroup> groups,
                             std::span<const double> grid) {
  std::vector<Counter> counters;
  for (const auto& g : groups) {
    if (g.weight == 0) continue;
    const double trials = static_cast<double>(g.weight);
    for (const auto& e : g.sketch.entries()) {
      const double c = std::clamp(std::round(e.second), 0.0, trials);
      counters.push_back({c, trials,
                          std::lgamma(trials + 1) - std::lgamma(c + 1) -
                              std::lgamma(trials - c + 1)});
    }
  }
  ThetaEstimate best;
  if (counters.size() < 2) return best;

  auto log_pmf = [](const Counter& c, double prob) {
    return c.log_choose + c.count * std::log(prob) + (c.trials - c.count) * std::log1p(-prob);
  };
  bool found = false;
  for (double p : grid) {
    for (double q : grid) {
      if (!(q < p) || !(q > 0.0) || !(p < 1.0)) continue;
      double total = 0.0;
      for (const auto& c : counters) total += std::max(log_pmf(c, p), log_pmf(c, q));
      if (!found || total > best.log_likelihood) {
        found = true;
        best.log_likelihood = total;
        best.p_hat = p;
        best.q_hat = q;
      }
    }
  }
  if (!found) return ThetaEstimate{};
  const double a = std::log((1.0 - best.q_hat) / (1.0 - best.p_hat));
  const double b = std::log(best.p_hat / best.q_hat);
  best.theta = a / (a + b);
  best.fallback = false;
  return best;
}

ThetaEstimate estimate_theta(std::span<const CenterGroup> groups) {
  return estimate_theta(groups, default_probability_grid());
}

}  // namespace sofa
