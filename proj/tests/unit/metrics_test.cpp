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

#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

#include "sofa/rng.hpp"

namespace sofa {
namespace {

MemoryStream stream_of(std::size_t n, const std::vector<IndexSet>& rows) {
  std::vector<Record> records;
  for (const auto& r : rows) records.push_back({records.size(), SparseBinaryVector(n, r)});
  return MemoryStream(n, std::move(records));
}

std::vector<LeftAssignment> membership_of(const std::vector<std::vector<std::uint32_t>>& sets) {
  std::vector<LeftAssignment> out;
  for (const auto& s : sets) out.push_back({out.size(), s});
  return out;
}

TEST(Jaccard, Conventions) {
  EXPECT_EQ(jaccard(IndexSet{}, IndexSet{}), 1.0);
  EXPECT_EQ(jaccard(IndexSet{}, IndexSet{1}), 0.0);
  EXPECT_EQ(jaccard(IndexSet{1, 2}, IndexSet{2, 3}), 1.0 / 3.0);
}

TEST(Quality, Examples) {
  const std::vector<IndexSet> ground{{1, 2}, {5, 6, 7}};
  EXPECT_EQ(quality(ground, std::vector<IndexSet>{{5, 6, 7}, {1, 2}}), 1.0);
  EXPECT_EQ(quality(ground, std::vector<IndexSet>{{3}, {4}}), 0.0);
  EXPECT_EQ(quality(std::vector<IndexSet>{{1, 2}}, std::vector<IndexSet>{{1}}), 0.5);
  EXPECT_EQ(quality(ground, std::vector<IndexSet>{}), 0.0);
  EXPECT_THROW(quality(std::vector<IndexSet>{}, ground), std::invalid_argument);
}

TEST(Reconstruction, Perfect) {
  const std::vector<IndexSet> clusters{{0, 1}, {2, 3}};
  MemoryStream s = stream_of(5, {{0, 1}, {0, 1, 2, 3}, {}});
  const auto r = reconstruction_stats(s, membership_of({{0}, {0, 1}, {}}), clusters);
  EXPECT_EQ(r.edges, 6u);
  EXPECT_EQ(r.gain, 1.0);
  EXPECT_EQ(r.recall, 1.0);
}

TEST(Reconstruction, AllZerosMatrix) {
  MemoryStream s = stream_of(5, {{0, 1}, {2}});
  const auto r = reconstruction_stats(s, membership_of({{}, {}}), std::vector<IndexSet>{{0, 1}});
  EXPECT_EQ(r.mismatches, 3u);
  EXPECT_EQ(r.gain, 0.0);
  EXPECT_EQ(r.recall, 0.0);
}

TEST(Reconstruction, OneMissedOneSpurious) {
  MemoryStream s = stream_of(6, {{0, 1, 2, 3}});
  const auto r = reconstruction_stats(s, membership_of({{0}}), std::vector<IndexSet>{{0, 1, 2, 4}});
  EXPECT_EQ(r.edges, 4u);
  EXPECT_EQ(r.mismatches, 2u);
  EXPECT_EQ(r.gain, 0.5);
  EXPECT_EQ(r.recall, 0.75);
}

TEST(Reconstruction, NegativeGainIsReported) {
  MemoryStream s = stream_of(6, {{0}});
  const auto r = reconstruction_stats(s, membership_of({{0}}), std::vector<IndexSet>{{1, 2, 3}});
  EXPECT_EQ(r.gain, -3.0);
  EXPECT_EQ(r.recall, 0.0);
}

TEST(Reconstruction, NoEdgesIsAnError) {
  MemoryStream s = stream_of(3, {{}, {}});
  EXPECT_THROW(reconstruction_stats(s, membership_of({{}, {}}), std::vector<IndexSet>{{0}}),
               std::domain_error);
}

TEST(Reconstruction, MembershipMustFollowStream) {
  MemoryStream s = stream_of(3, {{0}, {1}});
  EXPECT_THROW(reconstruction_stats(s, membership_of({{}}), std::vector<IndexSet>{{0}}),
               std::invalid_argument);
}

TEST(Reconstruction, MatchesDenseBooleanProduct) {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng.below(20);
    const std::size_t n = 1 + rng.below(20);
    const std::size_t k = 1 + rng.below(5);
    std::vector<std::vector<bool>> b(m, std::vector<bool>(n));
    std::vector<std::vector<bool>> left(m, std::vector<bool>(k));
    std::vector<std::vector<bool>> right(k, std::vector<bool>(n));
    for (auto& row : b) for (std::size_t j = 0; j < n; ++j) row[j] = rng.uniform() < 0.3;
    for (auto& row : left) for (std::size_t i = 0; i < k; ++i) row[i] = rng.uniform() < 0.3;
    for (auto& row : right) for (std::size_t j = 0; j < n; ++j) row[j] = rng.uniform() < 0.3;
    b[0][0] = true;  // at least one edge

    std::uint64_t edges = 0, mismatches = 0, covered = 0;
    std::vector<IndexSet> rows(m), clusters(k);
    std::vector<std::vector<std::uint32_t>> member(m);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < n; ++j) if (right[i][j]) clusters[i].push_back(static_cast<RightId>(j));
    }
    for (std::size_t u = 0; u < m; ++u) {
      for (std::size_t i = 0; i < k; ++i) if (left[u][i]) member[u].push_back(static_cast<std::uint32_t>(i));
      for (std::size_t j = 0; j < n; ++j) {
        bool product = false;
        for (std::size_t i = 0; i < k; ++i) product = product || (left[u][i] && right[i][j]);
        if (b[u][j]) rows[u].push_back(static_cast<RightId>(j));
        edges += b[u][j] ? 1 : 0;
        mismatches += b[u][j] != product ? 1 : 0;
        covered += (b[u][j] && product) ? 1 : 0;
      }
    }
    MemoryStream s = stream_of(n, rows);
    const auto r = reconstruction_stats(s, membership_of(member), clusters);
    EXPECT_EQ(r.edges, edges);
    EXPECT_EQ(r.mismatches, mismatches);
    EXPECT_EQ(r.covered, covered);
    EXPECT_DOUBLE_EQ(r.gain, 1.0 - static_cast<double>(mismatches) / static_cast<double>(edges));
    EXPECT_DOUBLE_EQ(r.recall, static_cast<double>(covered) / static_cast<double>(edges));
    EXPECT_LE(r.gain, 1.0);
    EXPECT_GE(r.recall, 0.0);
    EXPECT_LE(r.recall, 1.0);
  }
}

}  // namespace
}  // namespace sofa
