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

#include "sofa/second_pass.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sofa {

std::int64_t cover_score(std::span<const RightId> a, std::span<const RightId> x,
                         std::span<const RightId> y) {
  std::int64_t score = 0;
  for (RightId j : a) {
    if (std::binary_search(y.begin(), y.end(), j)) continue;
    score += std::binary_search(x.begin(), x.end(), j) ? 1 : -1;
  }
  return score;
}

ClusterIndex::ClusterIndex(std::size_t universe, std::vector<IndexSet> clusters)
    : clusters_(std::move(clusters)),
      postings_(universe),
      in_row_(universe, 0),
      in_cover_(universe, 0),
      overlap_(clusters_.size(), 0),
      picked_(clusters_.size(), 0) {
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    const IndexSet& c = clusters_[i];
    if (!std::is_sorted(c.begin(), c.end()) ||
        std::adjacent_find(c.begin(), c.end()) != c.end()) {
      throw std::invalid_argument("cluster ids must be strictly increasing");
    }
    if (!c.empty() && c.back() >= universe) {
      throw std::invalid_argument("cluster id outside the right universe");
    }
    for (RightId j : c) postings_[j].push_back(static_cast<std::uint32_t>(i));
  }
}

void ClusterIndex::touch(const SparseBinaryVector& row) {
  if (row.universe() != postings_.size()) {
    throw std::invalid_argument("row universe does not match clusters");
  }
  if (++epoch_ == 0) {
    std::fill(in_row_.begin(), in_row_.end(), 0);
    std::fill(in_cover_.begin(), in_cover_.end(), 0);
    epoch_ = 1;
  }
  for (std::uint32_t i : touched_) overlap_[i] = 0;
  touched_.clear();
  for (RightId j : row) {
    in_row_[j] = epoch_;
    for (std::uint32_t i : postings_[j]) {
      if (overlap_[i]++ == 0) touched_.push_back(i);
    }
  }
  std::sort(touched_.begin(), touched_.end());
}

std::optional<std::uint32_t> ClusterIndex::assign(const SparseBinaryVector& row) {
  touch(row);
  std::optional<std::uint32_t> best;
  for (std::uint32_t i : touched_) {
    // a_i / |V_i| > a_b / |V_b| without division.
    if (!best || static_cast<std::uint64_t>(overlap_[i]) * clusters_[*best].size() >
                     static_cast<std::uint64_t>(overlap_[*best]) * clusters_[i].size()) {
      best = i;
    }
  }
  return best;
}

std::vector<std::uint32_t> ClusterIndex::cover(const SparseBinaryVector& row,
                                               std::vector<std::int64_t>& totals) {
  if (totals.size() < clusters_.size()) totals.resize(clusters_.size(), 0);
  touch(row);
  // Clusters missing the row entirely score -|A \ Y| <= 0 and never win.
  std::vector<std::uint32_t> picks;
  for (;;) {
    std::int64_t best_score = 0;
    std::optional<std::uint32_t> best;
    for (std::uint32_t i : touched_) {
      if (picked_[i]) continue;
      std::int64_t s = 0;
      for (RightId j : clusters_[i]) {
        if (in_cover_[j] == epoch_) continue;
        s += in_row_[j] == epoch_ ? 1 : -1;
      }
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    if (!best) break;
    picked_[*best] = 1;
    picks.push_back(*best);
    totals[*best] += best_score;
    for (RightId j : clusters_[*best]) in_cover_[j] = epoch_;
  }
  for (std::uint32_t i : picks) picked_[i] = 0;
  std::sort(picks.begin(), picks.end());
  return picks;
}

std::vector<LeftAssignment> assign_left(StreamSource& stream,
                                        std::span<const IndexSet> clusters) {
  ClusterIndex index(stream.universe(), {clusters.begin(), clusters.end()});
  std::vector<LeftAssignment> out;
  Record record;
  stream.begin_pass();
  while (stream.next(record)) {
    LeftAssignment a{record.id, {}};
    if (auto c = index.assign(record.row)) a.clusters.push_back(*c);
    out.push_back(std::move(a));
  }
  return out;
}

CoverResult cover_left(StreamSource& stream, std::span<const IndexSet> clusters) {
  ClusterIndex index(stream.universe(), {clusters.begin(), clusters.end()});
  CoverResult out;
  out.totals.assign(clusters.size(), 0);
  Record record;
  stream.begin_pass();
  while (stream.next(record)) {
    out.membership.push_back({record.id, index.cover(record.row, out.totals)});
  }
  return out;
}

TopK select_top_k(std::span<const IndexSet> clusters,
                  std::span<const std::int64_t> totals, std::size_t k) {
  if (totals.size() != clusters.size()) {
    throw std::invalid_argument("one total per cluster required");
  }
  TopK out;
  out.kept.resize(clusters.size());
  std::iota(out.kept.begin(), out.kept.end(), 0);
  if (clusters.size() > k) {
    std::stable_sort(out.kept.begin(), out.kept.end(),
                     [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
    out.kept.resize(k);
    std::sort(out.kept.begin(), out.kept.end());
  }
  for (std::size_t i : out.kept) out.clusters.push_back(clusters[i]);
  return out;
}

std::vector<LeftAssignment> remap_membership(std::span<const LeftAssignment> membership,
                                             std::span<const std::size_t> kept,
                                             std::size_t original_count) {
  constexpr auto kDropped = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> new_index(original_count, kDropped);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    new_index.at(kept[i]) = static_cast<std::uint32_t>(i);
  }
  std::vector<LeftAssignment> out;
  out.reserve(membership.size());
  for (const auto& m : membership) {
    LeftAssignment a{m.id, {}};
    for (std::uint32_t c : m.clusters) {
      if (new_index.at(c) != kDropped) a.clusters.push_back(new_index[c]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<LeftRecovery> recover_left(StreamSource& stream,
                                       std::span<const std::vector<IndexSet>> candidates,
                                       LeftMode mode, std::size_t keep) {
  std::vector<ClusterIndex> indexes;
  std::vector<LeftRecovery> out(candidates.size());
  indexes.reserve(candidates.size());
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    indexes.emplace_back(stream.universe(), candidates[t]);
    if (mode == LeftMode::kBmf) out[t].totals.assign(candidates[t].size(), 0);
  }
  Record record;
  stream.begin_pass();
  while (stream.next(record)) {
    for (std::size_t t = 0; t < indexes.size(); ++t) {
      LeftAssignment a{record.id, {}};
      if (mode == LeftMode::kBmf) {
        a.clusters = indexes[t].cover(record.row, out[t].totals);
      } else if (auto c = indexes[t].assign(record.row)) {
        a.clusters.push_back(*c);
      }
      out[t].membership.push_back(std::move(a));
    }
  }
  for (std::size_t t = 0; t < out.size(); ++t) {
    const std::vector<IndexSet>& clusters = candidates[t];
    if (mode == LeftMode::kBmf && keep > 0 && clusters.size() > keep) {
      TopK top = select_top_k(clusters, out[t].totals, keep);
      out[t].membership = remap_membership(out[t].membership, top.kept, clusters.size());
      out[t].clusters = std::move(top.clusters);
    } else {
      out[t].clusters = clusters;
    }
  }
  return out;
}

}  // namespace sofa
