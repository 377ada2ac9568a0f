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

#include "sofa/baseline.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "sofa/center.hpp"
#include "sofa/rng.hpp"
#include "sofa/sofa.hpp"

namespace sofa {

Grouping static_grouping(std::span<const Record> records, std::size_t universe,
                         std::size_t k, const DistanceMetric& metric, std::uint64_t seed,
                         const StaticOptions& options) {
  if (records.empty()) throw std::invalid_argument("static clustering needs records");
  std::size_t edges = 0;
  for (const auto& r : records) edges += r.row.size();
  if (options.max_edges > 0 && edges > options.max_edges) {
    throw BudgetExceeded("static clustering needs " + std::to_string(edges) +
                         " edges in memory, budget is " + std::to_string(options.max_edges));
  }
  // Capacity covering the whole universe never evicts, so counts are exact.
  const std::size_t capacity = std::max<std::size_t>(universe, 1);
  std::vector<WeightedCenter> centers;
  centers.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    require_same_universe(records[i].row, records.front().row);
    centers.push_back(make_center(records[i].row, capacity, i));
  }
  SofaConfig config;
  config.k = k;
  config.metric = metric;
  config.seed = seed;
  config.sketch_capacity = capacity;
  config.kmedians = options.kmedians;
  return group_centers(centers, config);
}

std::vector<IndexSet> static_sofa(std::span<const Record> records, std::size_t universe,
                                  std::size_t k, double theta,
                                  const DistanceMetric& metric, std::uint64_t seed,
                                  const StaticOptions& options) {
  return threshold_groups(static_grouping(records, universe, k, metric, seed, options).groups,
                          theta);
}

std::vector<Record> reservoir_sample(StreamSource& stream, std::size_t size,
                                     std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::pair<std::size_t, Record>> slots;
  Record record;
  std::size_t t = 0;
  stream.begin_pass();
  while (stream.next(record)) {
    if (slots.size() < size) {
      slots.emplace_back(t, std::move(record));
    } else if (size > 0) {
      const std::size_t j = rng.below(t + 1);
      if (j < size) slots[j] = {t, std::move(record)};
    }
    ++t;
  }
  std::sort(slots.begin(), slots.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Record> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(s.second));
  return out;
}

ReductionResult rs_reduction(StreamSource& stream, const ReductionConfig& config,
                             const StaticAlgorithm& algorithm) {
  const std::size_t n = stream.universe();
  const std::vector<Record> sample = reservoir_sample(stream, config.sample_left, config.seed);
  ReductionResult out;
  out.sample_rows = sample.size();

  std::vector<std::uint32_t> degree(n, 0);
  for (const auto& r : sample) {
    out.sample_edges += r.row.size();
    for (RightId j : r.row) {
      if (degree[j]++ == 0) out.touched.push_back(j);
    }
  }
  std::sort(out.touched.begin(), out.touched.end());

  out.core = out.touched;
  if (out.core.size() > config.sample_right) {
    std::stable_sort(out.core.begin(), out.core.end(),
                     [&](RightId a, RightId b) { return degree[a] > degree[b]; });
    out.core.resize(config.sample_right);
    std::sort(out.core.begin(), out.core.end());
  }
  std::vector<char> in_core(n, 0);
  for (RightId j : out.core) in_core[j] = 1;

  std::vector<Record> restricted;
  restricted.reserve(sample.size());
  for (const auto& r : sample) {
    IndexSet kept;
    for (RightId j : r.row) {
      if (in_core[j]) kept.push_back(j);
    }
    restricted.push_back({r.id, SparseBinaryVector(n, std::move(kept))});
  }
  out.clusters = algorithm(restricted, n);

  // Sample rows containing each right id, i.e. its incidence vector.
  std::vector<std::vector<std::uint32_t>> incidence(n);
  for (std::size_t t = 0; t < sample.size(); ++t) {
    for (RightId j : sample[t].row) incidence[j].push_back(static_cast<std::uint32_t>(t));
  }

  // Cluster means: mean[i][t] = fraction of cluster i's ids present in row t.
  const std::size_t k = out.clusters.size();
  std::vector<std::vector<double>> mean(k, std::vector<double>(sample.size(), 0.0));
  std::vector<double> mean_norm(k, 0.0);
  std::vector<char> usable(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const IndexSet& c = out.clusters[i];
    if (c.empty()) continue;
    usable[i] = 1;
    const double scale = 1.0 / static_cast<double>(c.size());
    for (RightId j : c) {
      for (std::uint32_t t : incidence.at(j)) mean[i][t] += scale;
    }
    for (double x : mean[i]) mean_norm[i] += x * x;
  }

  std::vector<IndexSet> augmented = out.clusters;
  if (std::find(usable.begin(), usable.end(), 1) != usable.end()) {
    for (RightId j : out.touched) {
      if (in_core[j]) continue;
      const auto& x = incidence[j];
      std::size_t best = k;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i) {
        if (!usable[i]) continue;
        double dot = 0.0;
        for (std::uint32_t t : x) dot += mean[i][t];
        const double d = mean_norm[i] - 2.0 * dot + static_cast<double>(x.size());
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      augmented[best].push_back(j);
    }
    for (auto& c : augmented) std::sort(c.begin(), c.end());
  }
  out.clusters = std::move(augmented);
  return out;
}

}  // namespace sofa
