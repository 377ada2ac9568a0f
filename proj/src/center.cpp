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

#include "sofa/center.hpp"

#include <stdexcept>
#include <utility>

namespace sofa {

WeightedCenter make_center(SparseBinaryVector row, std::size_t sketch_capacity,
                           std::uint64_t insertion_order) {
  WeightedCenter c{std::move(row), 1, MGSketch(sketch_capacity), insertion_order};
  c.sketch.insert_all(c.vector);
  return c;
}

NearestResult nearest_center(const SparseBinaryVector& point,
                             std::span<const WeightedCenter> centers,
                             const DistanceMetric& metric) {
  NearestResult best;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = asym_hamming(centers[i].vector, point, metric);
    if (!best.index || d < best.distance ||
        (d == best.distance &&
         centers[i].insertion_order < centers[*best.index].insertion_order)) {
      best.index = i;
      best.distance = d;
    }
  }
  return best;
}

OverlapIndex::OverlapIndex(std::size_t universe) : postings_(universe) {}

std::size_t OverlapIndex::add(const SparseBinaryVector& v) {
  if (v.universe() != postings_.size()) {
    throw std::invalid_argument("vector universe does not match index");
  }
  const auto slot = static_cast<std::uint32_t>(sizes_.size());
  for (RightId j : v) {
    if (postings_[j].empty()) used_.push_back(j);
    postings_[j].push_back(slot);
  }
  sizes_.push_back(static_cast<std::uint32_t>(v.size()));
  return slot;
}

void OverlapIndex::clear() {
  for (RightId j : used_) postings_[j].clear();
  used_.clear();
  sizes_.clear();
}

std::span<const std::uint32_t> OverlapIndex::overlaps(
    const SparseBinaryVector& query) {
  if (query.universe() != postings_.size()) {
    throw std::invalid_argument("query universe does not match index");
  }
  counts_.assign(sizes_.size(), 0);
  for (RightId j : query) {
    for (std::uint32_t slot : postings_[j]) ++counts_[slot];
  }
  return counts_;
}

CenterSet::CenterSet(std::size_t universe, DistanceMetric metric)
    : metric_(metric), index_(universe) {}

NearestResult CenterSet::nearest(const SparseBinaryVector& point) {
  NearestResult best;
  const auto overlap = index_.overlaps(point);
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    const std::size_t common = overlap[i];
    const double d =
        metric_.combine(centers_[i].vector.size() - common, point.size() - common);
    // Slots are filled in insertion order, so strict < keeps the earliest.
    if (!best.index || d < best.distance) {
      best.index = i;
      best.distance = d;
    }
  }
  return best;
}

std::size_t CenterSet::add(WeightedCenter center) {
  center.insertion_order = centers_.size();
  index_.add(center.vector);
  centers_.push_back(std::move(center));
  return centers_.size() - 1;
}

void CenterSet::clear() {
  index_.clear();
  centers_.clear();
}

std::vector<WeightedCenter> CenterSet::release() {
  std::vector<WeightedCenter> out = std::move(centers_);
  clear();
  return out;
}

}  // namespace sofa
