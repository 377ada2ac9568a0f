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

#include "sofa/sparse_vector.hpp"

#include <algorithm>
#include <string>

namespace sofa {

SparseBinaryVector::SparseBinaryVector(std::size_t universe, IndexSet indices)
    : universe_(universe), indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= universe_) {
      throw std::invalid_argument("index " + std::to_string(indices_[i]) +
                                  " outside universe of size " +
                                  std::to_string(universe_));
    }
    if (i > 0 && indices_[i - 1] >= indices_[i]) {
      throw std::invalid_argument("indices must be strictly increasing");
    }
  }
}

SparseBinaryVector SparseBinaryVector::from_unsorted(std::size_t universe,
                                                     IndexSet indices) {
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw std::invalid_argument("duplicate index in sparse vector");
  }
  return SparseBinaryVector(universe, std::move(indices));
}

bool SparseBinaryVector::contains(RightId j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

DistanceMetric::DistanceMetric(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("asymmetry weight must lie in (0, 1]");
  }
}

std::size_t intersection_size(std::span<const RightId> x,
                              std::span<const RightId> y) {
  std::size_t common = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

void require_same_universe(const SparseBinaryVector& x,
                           const SparseBinaryVector& y) {
  if (x.universe() != y.universe()) {
    throw std::invalid_argument("universe size mismatch: " +
                                std::to_string(x.universe()) + " vs " +
                                std::to_string(y.universe()));
  }
}

std::size_t hamming(const SparseBinaryVector& x, const SparseBinaryVector& y) {
  require_same_universe(x, y);
  const std::size_t common = intersection_size(x.indices(), y.indices());
  return x.size() + y.size() - 2 * common;
}

double asym_hamming(const SparseBinaryVector& center,
                    const SparseBinaryVector& point,
                    const DistanceMetric& metric) {
  require_same_universe(center, point);
  const std::size_t common = intersection_size(center.indices(), point.indices());
  return metric.combine(center.size() - common, point.size() - common);
}

}  // namespace sofa
