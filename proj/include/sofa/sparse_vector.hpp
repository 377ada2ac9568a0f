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
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace sofa {

using RightId = std::uint32_t;

// Sorted set of right-vertex ids; one row of the biadjacency matrix.
using IndexSet = std::vector<RightId>;

class SparseBinaryVector {
 public:
  SparseBinaryVector() = default;

  // Throws std::invalid_argument unless `indices` is strictly increasing
  // and every entry is below `universe`.
  SparseBinaryVector(std::size_t universe, IndexSet indices);
  SparseBinaryVector(std::size_t universe, std::initializer_list<RightId> indices)
      : SparseBinaryVector(universe, IndexSet(indices)) {}

  // Sorts and validates; duplicates are rejected.
  static SparseBinaryVector from_unsorted(std::size_t universe, IndexSet indices);

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::span<const RightId> indices() const { return indices_; }
  bool contains(RightId j) const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const SparseBinaryVector&,
                         const SparseBinaryVector&) = default;

 private:
  std::size_t universe_ = 0;
  IndexSet indices_;
};

// Asymmetric weighted Hamming distance. A coordinate where the center has a
// 1 and the point a 0 costs `alpha`; the reverse costs 1. alpha == 1 is the
// plain Hamming distance.
class DistanceMetric {
 public:
  explicit DistanceMetric(double alpha = 1.0);

  static DistanceMetric symmetric() { return DistanceMetric(1.0); }

  double alpha() const { return alpha_; }
  bool is_symmetric() const { return alpha_ == 1.0; }

  // Combines the two one-sided mismatch counts. Every distance in the
  // library goes through here so that indexed and direct evaluation agree
  // bit for bit.
  double combine(std::size_t center_only, std::size_t point_only) const {
    return alpha_ * static_cast<double>(center_only) +
           static_cast<double>(point_only);
  }

 private:
  double alpha_;
};

// |x ∩ y| by linear merge.
std::size_t intersection_size(std::span<const RightId> x,
                              std::span<const RightId> y);

std::size_t hamming(const SparseBinaryVector& x, const SparseBinaryVector& y);

double asym_hamming(const SparseBinaryVector& center,
                    const SparseBinaryVector& point,
                    const DistanceMetric& metric);

// Throws std::invalid_argument when the universes differ.
void require_same_universe(const SparseBinaryVector& x,
                           const SparseBinaryVector& y);

}  // namespace sofa
