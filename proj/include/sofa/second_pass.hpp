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
#include <span>
#include <vector>

#include "sofa/sparse_vector.hpp"
#include "sofa/stream_io.hpp"

namespace sofa {

// |(X \ Y) ∩ A| - |A \ (X ∪ Y)|: the drop in |X △ Y| from adding A to Y.
// All three sets sorted.
std::int64_t cover_score(std::span<const RightId> a, std::span<const RightId> x,
                         std::span<const RightId> y);

// Right clusters with an inverted index, answering per-row queries in time
// proportional to the clusters the row touches.
class ClusterIndex {
 public:
  ClusterIndex(std::size_t universe, std::vector<IndexSet> clusters);

  std::size_t universe() const { return postings_.size(); }
  std::size_t size() const { return clusters_.size(); }
  const std::vector<IndexSet>& clusters() const { return clusters_; }

  // Cluster maximizing |row ∩ V_i| / |V_i| over nonempty clusters, ties to
  // the lowest index; none when every ratio is 0.
  std::optional<std::uint32_t> assign(const SparseBinaryVector& row);

  // Greedy cover of `row`. Appends the accepted score of each pick to
  // `totals` (resized to size() if needed) and returns the picked clusters
  // in ascending order.
  std::vector<std::uint32_t> cover(const SparseBinaryVector& row,
                                   std::vector<std::int64_t>& totals);

 private:
  void touch(const SparseBinaryVector& row);

  std::vector<IndexSet> clusters_;
  std::vector<std::vector<std::uint32_t>> postings_;
  // Scratch state, reset per row through epoch stamps.
  std::vector<std::uint32_t> in_row_;
  std::vector<std::uint32_t> in_cover_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> overlap_;
  std::vector<std::uint32_t> touched_;
  std::vector<char> picked_;
};

// Consumes one pass. Unassigned vertices get an empty cluster list.
std::vector<LeftAssignment> assign_left(StreamSource& stream,
                                        std::span<const IndexSet> clusters);

struct CoverResult {
  std::vector<LeftAssignment> membership;
  std::vector<std::int64_t> totals;  // one per cluster
};

// Consumes one pass.
CoverResult cover_left(StreamSource& stream, std::span<const IndexSet> clusters);

struct TopK {
  std::vector<IndexSet> clusters;
  // Original index of every kept cluster, ascending.
  std::vector<std::size_t> kept;
};

// Keeps the k clusters with the highest totals, ties to the lower index,
// in their original relative order.
TopK select_top_k(std::span<const IndexSet> clusters,
                  std::span<const std::int64_t> totals, std::size_t k);

// Drops memberships of clusters not in `kept` and renumbers the rest.
std::vector<LeftAssignment> remap_membership(std::span<const LeftAssignment> membership,
                                             std::span<const std::size_t> kept,
                                             std::size_t original_count);

struct LeftRecovery {
  std::vector<IndexSet> clusters;
  std::vector<LeftAssignment> membership;
  // Cover totals before pruning; empty in bicluster mode.
  std::vector<std::int64_t> totals;
};

// Recovers left clusters for several candidate cluster lists in a single
// pass. Bicluster mode assigns each vertex exclusively; BMF mode covers it
// greedily and, when `keep` > 0, then keeps the top `keep` clusters by total
// score and discards memberships of the dropped ones.
std::vector<LeftRecovery> recover_left(StreamSource& stream,
                                       std::span<const std::vector<IndexSet>> candidates,
                                       LeftMode mode, std::size_t keep);

}  // namespace sofa
