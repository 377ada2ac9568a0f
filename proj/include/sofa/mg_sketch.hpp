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
#include <unordered_map>
#include <utility>
#include <vector>

#include "sofa/sparse_vector.hpp"

namespace sofa {

// Weighted, mergeable Misra-Gries frequent-items summary.
//
// Holds at most `capacity` live counters. Estimates never exceed the true
// frequency and undershoot it by at most total_weight() / (capacity + 1),
// both for a single stream and for any tree of merges.
//
// A decrement of every live counter is applied lazily through a shared
// offset, so inserts cost O(log capacity) amortized regardless of capacity.
class MGSketch {
 public:
  using Entry = std::pair<RightId, double>;

  // Throws std::invalid_argument when capacity == 0.
  explicit MGSketch(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return raw_.size(); }
  bool empty() const { return raw_.empty(); }
  double total_weight() const { return total_weight_; }

  // Throws std::invalid_argument unless weight is finite and positive.
  void insert(RightId item, double weight = 1.0);

  // Unit-weight insert of every index of a row.
  void insert_all(const SparseBinaryVector& row);

  double estimate(RightId item) const;

  // Live counters in ascending id order.
  std::vector<Entry> entries() const;

  double counter_sum() const;

  // Mergeable-summary merge: counter-wise sum, then subtract the
  // (capacity+1)-th largest value and drop non-positive counters.
  // Throws std::invalid_argument on capacity mismatch.
  void merge(const MGSketch& other);

 private:
  double smallest_live();
  void evict_non_positive();
  void rebuild_heap();

  std::size_t capacity_;
  double total_weight_ = 0.0;
  // Live value of item i is raw_[i] - offset_.
  double offset_ = 0.0;
  std::unordered_map<RightId, double> raw_;
  // Min-heap on raw value; entries whose value no longer matches raw_ are
  // stale and skipped.
  std::vector<std::pair<double, RightId>> heap_;
};

MGSketch merged(MGSketch a, const MGSketch& b);

// Ids whose estimate is at least `min_count`, ascending.
IndexSet heavy_items(const MGSketch& sketch, double min_count);

}  // namespace sofa
