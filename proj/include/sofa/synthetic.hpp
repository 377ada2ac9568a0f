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
#include <vector>

#include "sofa/sparse_vector.hpp"
#include "sofa/stream_io.hpp"

namespace sofa {

// Planted bicluster model: k left blocks of `ell` vertices, each tied to a
// right set V_i of size r. An edge (u, v) appears with probability p when v
// lies in the right set of u's block and with probability q otherwise.
struct PlantedParams {
  std::size_t n = 8000;
  std::size_t k = 50;
  std::size_t ell = 200;
  std::size_t r = 30;
  double p = 0.7;
  // Exactly one of q and noise_degree may be set; noise_degree gives
  // q = noise_degree / (n - r).
  std::optional<double> q;
  std::optional<double> noise_degree = 20.0;
  std::uint64_t seed = 0;
  // Sample the right sets disjoint (requires k * r <= n).
  bool disjoint_right = false;
  // Seeded random stream order; false streams block by block.
  bool shuffle = true;

  std::size_t left_count() const { return k * ell; }
  double noise_probability() const;
  // Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

struct GroundTruth {
  std::size_t universe = 0;
  std::vector<IndexSet> right;
  // Block of each left vertex, indexed by left id (= stream position).
  std::vector<std::uint32_t> left_cluster;

  // Left ids of each block, ascending.
  std::vector<IndexSet> left_clusters() const;
  GroundTruthFile to_file() const;
};

// Rows are regenerated from per-vertex seeds on demand, so arbitrarily large
// instances stream without being held in memory.
class PlantedStream final : public StreamSource {
 public:
  explicit PlantedStream(const PlantedParams& params);

  const PlantedParams& params() const { return params_; }
  const GroundTruth& truth() const { return truth_; }

  // Row of the left vertex at stream position `id`.
  SparseBinaryVector row(std::size_t id) const;

 protected:
  void rewind() override { pos_ = 0; }
  bool read_next(Record& out) override;

 private:
  PlantedParams params_;
  double q_;
  GroundTruth truth_;
  std::size_t pos_ = 0;
};

struct PlantedInstance {
  MemoryStream stream;
  GroundTruth truth;
};

// Materialized instance; identical records to PlantedStream(params).
PlantedInstance generate_planted(const PlantedParams& params);

}  // namespace sofa
