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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sofa/mg_sketch.hpp"
#include "sofa/sparse_vector.hpp"

namespace sofa {

// A retained left vertex standing in for every vertex assigned to it.
struct WeightedCenter {
  SparseBinaryVector vector;
  std::uint64_t weight = 1;
  MGSketch sketch{1};
  std::uint64_t insertion_order = 0;

  // Vector entries plus live sketch counters.
  std::size_t logical_entries() const { return vector.size() + sketch.size(); }
};

// Opens a center for `row` with weight 1 and a sketch seeded with the row.
WeightedCenter make_center(SparseBinaryVector row, std::size_t sketch_capacity,
                           std::uint64_t insertion_order);

struct NearestResult {
  std::optional<std::size_t> index;
  double distance = std::numeric_limits<double>::infinity();
};

// Exhaustive scan. Distances are asym_hamming(center, point); ties go to the
// lowest insertion order. An empty collection yields (none, +inf).
NearestResult nearest_center(const SparseBinaryVector& point,
                             std::span<const WeightedCenter> centers,
                             const DistanceMetric& metric);

// Inverted index from right id to the slots whose vector contains it. Gives
// |v_slot ∩ query| for every slot in O(slots + sum of posting lengths).
class OverlapIndex {
 public:
  explicit OverlapIndex(std::size_t universe);

  std::size_t add(const SparseBinaryVector& v);
  void clear();
  std::size_t size() const { return sizes_.size(); }
  std::size_t universe() const { return postings_.size(); }
  std::size_t vector_size(std::size_t slot) const { return sizes_[slot]; }

  // Valid until the next call to any non-const member.
  std::span<const std::uint32_t> overlaps(const SparseBinaryVector& query);

 private:
  std::vector<std::vector<std::uint32_t>> postings_;
  std::vector<RightId> used_;
  std::vector<std::uint32_t> sizes_;
  std::vector<std::uint32_t> counts_;
};

// Centers in insertion order plus an overlap index over their vectors, so
// that nearest-center queries agree exactly with nearest_center().
class CenterSet {
 public:
  CenterSet(std::size_t universe, DistanceMetric metric);

  NearestResult nearest(const SparseBinaryVector& point);
  // Appends and stamps the center's insertion order with its slot.
  std::size_t add(WeightedCenter center);
  void clear();

  std::size_t size() const { return centers_.size(); }
  bool empty() const { return centers_.empty(); }
  WeightedCenter& operator[](std::size_t i) { return centers_[i]; }
  const WeightedCenter& operator[](std::size_t i) const { return centers_[i]; }
  std::span<const WeightedCenter> centers() const { return centers_; }
  const DistanceMetric& metric() const { return metric_; }

  // Moves the centers out and leaves the set empty.
  std::vector<WeightedCenter> release();

 private:
  DistanceMetric metric_;
  OverlapIndex index_;
  std::vector<WeightedCenter> centers_;
};

}  // namespace sofa
