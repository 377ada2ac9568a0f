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

#include "sofa/greedy.hpp"

#include <stdexcept>

namespace sofa {

std::vector<WeightedCenter> greedy_pass(StreamSource& stream,
                                        const GreedyConfig& config) {
  if (config.distance_threshold < 0.0) {
    throw std::invalid_argument("distance threshold must be nonnegative");
  }
  CenterSet centers(stream.universe(), config.metric);
  stream.begin_pass();
  Record record;
  while (stream.next(record)) {
    const NearestResult near = centers.nearest(record.row);
    if (!near.index || near.distance > config.distance_threshold) {
      centers.add(make_center(std::move(record.row), config.sketch_capacity,
                              centers.size()));
      continue;
    }
    WeightedCenter& c = centers[*near.index];
    c.sketch.insert_all(record.row);
    ++c.weight;
  }
  return centers.release();
}

std::vector<IndexSet> threshold_clusters(std::span<const WeightedCenter> centers,
                                         double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  std::vector<IndexSet> clusters;
  clusters.reserve(centers.size());
  for (const auto& c : centers) {
    clusters.push_back(heavy_items(c.sketch, theta * static_cast<double>(c.weight)));
  }
  return clusters;
}

TheoryParameters theory_parameters(double p, std::size_t s, double k4) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  if (!(k4 > 0.0)) throw std::invalid_argument("k4 must be positive");
  return {0.49 * k4 * static_cast<double>(s), 0.75 * p};
}

}  // namespace sofa
