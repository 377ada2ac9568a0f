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

#include "sofa/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sofa {

double jaccard(std::span<const RightId> a, std::span<const RightId> b) {
  if (a.empty() && b.empty()) return 1.0;
  const std::size_t common = intersection_size(a, b);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double quality(std::span<const IndexSet> ground, std::span<const IndexSet> found) {
  if (ground.empty()) throw std::invalid_argument("quality needs ground-truth clusters");
  double total = 0.0;
  for (const auto& g : ground) {
    double best = 0.0;
    for (const auto& f : found) best = std::max(best, jaccard(g, f));
    total += best;
  }
  return total / static_cast<double>(ground.size());
}

void ReconstructionAccumulator::add(const SparseBinaryVector& row,
                                    std::span<const std::uint32_t> membership) {
  scratch_.clear();
  for (std::uint32_t c : membership) {
    const IndexSet& v = clusters_[c];
    scratch_.insert(scratch_.end(), v.begin(), v.end());
  }
  if (membership.size() > 1) {
    std::sort(scratch_.begin(), scratch_.end());
    scratch_.erase(std::unique(scratch_.begin(), scratch_.end()), scratch_.end());
  }
  const std::size_t common = intersection_size(row.indices(), scratch_);
  stats_.edges += row.size();
  stats_.covered += common;
  stats_.mismatches += row.size() + scratch_.size() - 2 * common;
}

ReconstructionStats ReconstructionAccumulator::finish() const {
  if (stats_.edges == 0) {
    throw std::domain_error("reconstruction metrics are undefined without edges");
  }
  ReconstructionStats out = stats_;
  const auto edges = static_cast<double>(out.edges);
  out.gain = 1.0 - static_cast<double>(out.mismatches) / edges;
  out.recall = static_cast<double>(out.covered) / edges;
  return out;
}

ReconstructionStats reconstruction_stats(StreamSource& stream,
                                         std::span<const LeftAssignment> membership,
                                         std::span<const IndexSet> clusters) {
  ReconstructionAccumulator acc(clusters);
  Record record;
  std::size_t i = 0;
  stream.begin_pass();
  while (stream.next(record)) {
    if (i >= membership.size() || membership[i].id != record.id) {
      throw std::invalid_argument("membership does not follow the stream at record " +
                                  std::to_string(i));
    }
    for (std::uint32_t c : membership[i].clusters) {
      if (c >= clusters.size()) throw std::invalid_argument("membership cluster out of range");
    }
    acc.add(record.row, membership[i].clusters);
    ++i;
  }
  if (i != membership.size()) {
    throw std::invalid_argument("membership lists more vertices than the stream");
  }
  return acc.finish();
}

}  // namespace sofa
