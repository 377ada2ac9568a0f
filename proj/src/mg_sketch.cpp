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

#include "sofa/mg_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace sofa {
namespace {

using HeapEntry = std::pair<double, RightId>;
constexpr auto kMinHeap = std::greater<HeapEntry>{};

}  // namespace

MGSketch::MGSketch(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("sketch capacity must be positive");
  }
}

void MGSketch::insert(RightId item, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("sketch weights must be finite and positive");
  }
  total_weight_ += weight;

  auto it = raw_.find(item);
  const bool tracked = it != raw_.end();
  if (!tracked && raw_.size() >= capacity_) {
    // Full table, untracked item: one closed-form decrement step.
    const double smallest = smallest_live();
    if (weight < smallest) {
      offset_ += weight;
      return;
    }
    offset_ = heap_.front().first;
    evict_non_positive();
    weight -= smallest;
    if (weight <= 0.0) return;
  }

  double value;
  if (tracked) {
    it->second += weight;
    value = it->second;
  } else {
    value = offset_ + weight;
    raw_.emplace(item, value);
  }
  heap_.emplace_back(value, item);
  std::push_heap(heap_.begin(), heap_.end(), kMinHeap);
  if (heap_.size() > 2 * capacity_ + 64) rebuild_heap();
}

void MGSketch::insert_all(const SparseBinaryVector& row) {
  for (RightId j : row) insert(j, 1.0);
}

double MGSketch::estimate(RightId item) const {
  auto it = raw_.find(item);
  return it == raw_.end() ? 0.0 : it->second - offset_;
}

std::vector<MGSketch::Entry> MGSketch::entries() const {
  std::vector<Entry> out;
  out.reserve(raw_.size());
  for (const auto& [item, raw] : raw_) out.emplace_back(item, raw - offset_);
  std::sort(out.begin(), out.end());
  return out;
}

double MGSketch::counter_sum() const {
  double sum = 0.0;
  for (const auto& [item, raw] : raw_) sum += raw - offset_;
  return sum;
}

void MGSketch::merge(const MGSketch& other) {
  if (other.capacity_ != capacity_) {
    throw std::invalid_argument("cannot merge sketches of different capacity");
  }
  std::unordered_map<RightId, double> sum;
  sum.reserve(raw_.size() + other.raw_.size());
  for (const auto& [item, raw] : raw_) sum[item] += raw - offset_;
  for (const auto& [item, raw] : other.raw_) sum[item] += raw - other.offset_;

  if (sum.size() > capacity_) {
    std::vector<double> values;
    values.reserve(sum.size());
    for (const auto& [item, v] : sum) values.push_back(v);
    std::nth_element(values.begin(), values.begin() + capacity_, values.end(),
                     std::greater<>{});
    const double cut = values[capacity_];
    std::erase_if(sum, [cut](const auto& kv) { return kv.second <= cut; });
    for (auto& [item, v] : sum) v -= cut;
  }

  total_weight_ += other.total_weight_;
  offset_ = 0.0;
  raw_ = std::move(sum);
  rebuild_heap();
}

double MGSketch::smallest_live() {
  while (true) {
    const auto& [value, item] = heap_.front();
    auto it = raw_.find(item);
    if (it != raw_.end() && it->second == value) return value - offset_;
    std::pop_heap(heap_.begin(), heap_.end(), kMinHeap);
    heap_.pop_back();
  }
}

void MGSketch::evict_non_positive() {
  while (!heap_.empty() && heap_.front().first <= offset_) {
    const auto [value, item] = heap_.front();
    std::pop_heap(heap_.begin(), heap_.end(), kMinHeap);
    heap_.pop_back();
    auto it = raw_.find(item);
    if (it != raw_.end() && it->second == value) raw_.erase(it);
  }
}

void MGSketch::rebuild_heap() {
  heap_.clear();
  heap_.reserve(raw_.size());
  for (const auto& [item, raw] : raw_) heap_.emplace_back(raw, item);
  std::make_heap(heap_.begin(), heap_.end(), kMinHeap);
}

MGSketch merged(MGSketch a, const MGSketch& b) {
  a.merge(b);
  return a;
}

IndexSet heavy_items(const MGSketch& sketch, double min_count) {
  IndexSet out;
  for (const auto& [item, value] : sketch.entries()) {
    if (value >= min_count) out.push_back(item);
  }
  return out;
}

}  // namespace sofa
