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

#include "sofa/sofa.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "sofa/baseline.hpp"
#include "sofa/metrics.hpp"
#include "sofa/rng.hpp"
#include "sofa/synthetic.hpp"

namespace sofa {
namespace {

MemoryStream random_stream(std::size_t n, std::size_t m, double density, SplitMix64& rng) {
  std::vector<Record> records;
  for (std::size_t u = 0; u < m; ++u) {
    IndexSet ids;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.uniform() < density) ids.push_back(static_cast<RightId>(j));
    }
    records.push_back({u, SparseBinaryVector(n, ids)});
  }
  return MemoryStream(n, std::move(records));
}

std::uint64_t total_weight(const std::vector<WeightedCenter>& centers) {
  std::uint64_t total = 0;
  for (const auto& c : centers) total += c.weight;
  return total;
}

SofaConfig config_for(std::size_t k, std::size_t cmax, std::size_t capacity, std::uint64_t seed) {
  SofaConfig c;
  c.k = k;
  c.cmax = cmax;
  c.sketch_capacity = capacity;
  c.seed = seed;
  return c;
}

bool is_subset(const IndexSet& a, const IndexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

TEST(SofaConfig, Validation) {
  EXPECT_EQ(SofaConfig{}.center_budget(), 20u);
  EXPECT_THROW(config_for(0, 10, 1, 0).validate(), std::invalid_argument);
  EXPECT_THROW(config_for(5, 5, 1, 0).validate(), std::invalid_argument);
  EXPECT_THROW(config_for(2, 10, 0, 0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(config_for(2, 3, 1, 0).validate());
}

TEST(SofaConfig, DefaultSketchCapacity) {
  EXPECT_EQ(default_sketch_capacity(10, 100), 30u);
  EXPECT_EQ(default_sketch_capacity(1, 1000), 50u);
  EXPECT_EQ(default_sketch_capacity(0, 0), 1u);
}

TEST(SofaPass, IdenticalRecordsGiveOneCenter) {
  std::vector<Record> records;
  for (LeftId u = 0; u < 500; ++u) records.push_back({u, SparseBinaryVector(50, {3, 9, 27})});
  MemoryStream s(50, records);
  const auto r = sofa_pass(s, config_for(2, 10, 4, 1));
  ASSERT_EQ(r.centers.size(), 1u);
  EXPECT_EQ(r.centers[0].weight, 500u);
  ASSERT_EQ(r.phases.size(), 1u);
  EXPECT_FALSE(r.phases[0].restarted);
  EXPECT_EQ(r.phases[0].cost, 0.0);
  EXPECT_EQ(r.centers[0].sketch.estimate(9), 500.0);
}

TEST(SofaPass, FirstRecordAlwaysOpens) {
  SplitMix64 rng(1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    MemoryStream s = random_stream(20, 1, 0.3, rng);
    const auto r = sofa_pass(s, config_for(1, 5, 2, seed));
    ASSERT_EQ(r.centers.size(), 1u);
    EXPECT_EQ(r.centers[0].vector, s.records()[0].row);
  }
}

TEST(SofaPass, EmptyStream) {
  MemoryStream s(10, {});
  const auto r = sofa_pass(s, config_for(1, 5, 2, 0));
  EXPECT_TRUE(r.centers.empty());
  EXPECT_EQ(r.records, 0u);
}

TEST(SofaPass, ConservationAndBudgetUnderRestarts) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 1 + rng.below(3);
    const std::size_t cmax = k + 1 + rng.below(8);
    MemoryStream s = random_stream(40, 300, 0.2, rng);
    std::vector<PhaseRecord> observed;
    const auto r = sofa_pass(s, config_for(k, cmax, 1 + rng.below(6), trial),
                             [&](const PhaseRecord& p) { observed.push_back(p); });
    EXPECT_EQ(total_weight(r.centers), 300u);
    EXPECT_EQ(r.records, 300u);
    EXPECT_LE(r.centers.size(), cmax);
    EXPECT_LE(r.peak_centers, cmax);
    EXPECT_LE(r.phases.size(), kDefaultMaxPhases);
    EXPECT_EQ(observed.size(), r.phases.size());
    for (const auto& p : r.phases) {
      EXPECT_EQ(p.total_weight, p.records_consumed);
      EXPECT_LE(p.centers, cmax);
      if (!p.restarted) EXPECT_LE(p.cost, 2.0 * p.lower_bound);
    }
    for (std::size_t i = 1; i < r.phases.size(); ++i) {
      EXPECT_EQ(r.phases[i].lower_bound, 2.0 * r.phases[i - 1].lower_bound);
      EXPECT_TRUE(r.phases[i - 1].restarted);
    }
    EXPECT_FALSE(r.phases.back().restarted);
    EXPECT_EQ(r.phases.back().records_consumed, 300u);
  }
}

TEST(SofaPass, PeakMemoryCoversFinalState) {
  SplitMix64 rng(3);
  MemoryStream s = random_stream(60, 400, 0.1, rng);
  const auto r = sofa_pass(s, config_for(2, 12, 5, 9));
  std::size_t final_entries = 0;
  for (const auto& c : r.centers) final_entries += c.logical_entries();
  EXPECT_GE(r.peak_memory_entries, final_entries);
  EXPECT_LE(r.peak_memory_entries, 12u * (60u + 5u) + 60u);
}

TEST(SofaPass, BitReproducible) {
  SplitMix64 rng(4);
  MemoryStream base = random_stream(50, 400, 0.15, rng);
  const auto records = base.records();
  auto run = [&] {
    MemoryStream s(50, {records.begin(), records.end()});
    return sofa_pass(s, config_for(3, 15, 4, 77));
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.centers.size(), b.centers.size());
  for (std::size_t i = 0; i < a.centers.size(); ++i) {
    EXPECT_EQ(a.centers[i].vector, b.centers[i].vector);
    EXPECT_EQ(a.centers[i].weight, b.centers[i].weight);
    EXPECT_EQ(a.centers[i].sketch.entries(), b.centers[i].sketch.entries());
  }
  ASSERT_EQ(a.phases.size(), b.phases.size());
  for (std::size_t i = 0; i < a.phases.size(); ++i) {
    EXPECT_EQ(format_phase_record(a.phases[i]), format_phase_record(b.phases[i]));
  }
}

TEST(SofaPass, PhaseCeilingIsDiagnosed) {
  SplitMix64 rng(5);
  MemoryStream s = random_stream(40, 300, 0.3, rng);
  SofaConfig c = config_for(1, 2, 2, 0);
  c.max_phases = 1;
  EXPECT_THROW(sofa_pass(s, c), std::runtime_error);
}

TEST(SofaPass, PhaseRecordIsOneJsonLine) {
  const PhaseRecord p{3, 8.0, 2.5, 7, 100, 100, true};
  const std::string line = format_phase_record(p);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["phase"], 3);
  EXPECT_EQ(j["lower_bound"], 8.0);
  EXPECT_EQ(j["restarted"], true);
}

TEST(SofaPostprocess, IdentityGroupingWhenCentersEqualK) {
  std::vector<WeightedCenter> centers;
  for (RightId j = 0; j < 3; ++j) {
    auto c = make_center(SparseBinaryVector(12, {static_cast<RightId>(4 * j), static_cast<RightId>(4 * j + 1)}), 8, j);
    c.weight = 2;
    c.sketch.insert(4 * j, 1.0);
    centers.push_back(c);
  }
  const auto grouping = group_centers(centers, config_for(3, 10, 8, 0));
  EXPECT_FALSE(grouping.underfull);
  ASSERT_EQ(grouping.groups.size(), 3u);
  for (const auto& g : grouping.groups) EXPECT_EQ(g.members.size(), 1u);
  auto clusters = sofa_postprocess(centers, config_for(3, 10, 8, 0), 0.75);
  std::sort(clusters.begin(), clusters.end());
  EXPECT_EQ(clusters, (std::vector<IndexSet>{{0}, {4}, {8}}));
}

TEST(SofaPostprocess, IdenticalCentersMergeUnderOneGroup) {
  std::vector<WeightedCenter> centers;
  for (int i = 0; i < 2; ++i) {
    auto c = make_center(SparseBinaryVector(10, {1, 2}), 4, i);
    c.weight = 3;
    c.sketch.insert(1, 2.0);
    centers.push_back(c);
  }
  const auto grouping = group_centers(centers, config_for(1, 5, 4, 0));
  ASSERT_EQ(grouping.groups.size(), 1u);
  EXPECT_EQ(grouping.groups[0].weight, 6u);
  EXPECT_EQ(grouping.groups[0].sketch.estimate(1), 6.0);
  EXPECT_EQ(grouping.groups[0].sketch.estimate(2), 2.0);
  EXPECT_EQ(sofa_postprocess(centers, config_for(1, 5, 4, 0), 0.5),
            (std::vector<IndexSet>{{1}}));
}

TEST(SofaPostprocess, FewerCentersThanKIsFlagged) {
  std::vector<WeightedCenter> centers{make_center(SparseBinaryVector(4, {0}), 2, 0)};
  const auto grouping = group_centers(centers, config_for(3, 10, 2, 0));
  EXPECT_TRUE(grouping.underfull);
  ASSERT_EQ(grouping.groups.size(), 3u);
  EXPECT_EQ(grouping.groups[1].weight, 0u);
  const auto clusters = threshold_groups(grouping.groups, 0.5);
  EXPECT_EQ(clusters, (std::vector<IndexSet>{{0}, {}, {}}));
}

TEST(MultiThreshold, SingletonEqualsPostprocess) {
  SplitMix64 rng(6);
  MemoryStream s = random_stream(30, 200, 0.2, rng);
  const auto cfg = config_for(3, 20, 8, 2);
  const auto r = sofa_pass(s, cfg);
  const std::vector<double> thetas{0.5};
  const auto multi = multi_threshold(r.centers, cfg, thetas);
  ASSERT_EQ(multi.size(), 1u);
  EXPECT_EQ(multi[0].theta, 0.5);
  EXPECT_EQ(multi[0].clusters, sofa_postprocess(r.centers, cfg, 0.5));
}

TEST(MultiThreshold, ClustersNestInTheta) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    MemoryStream s = random_stream(30, 200, 0.25, rng);
    const auto cfg = config_for(4, 16, 6, trial);
    const auto r = sofa_pass(s, cfg);
    const std::vector<double> thetas{0.7, 0.6, 0.5, 0.4, 0.3, 0.1};
    const auto multi = multi_threshold(r.centers, cfg, thetas);
    for (std::size_t t = 1; t < multi.size(); ++t) {
      for (std::size_t i = 0; i < cfg.k; ++i) {
        EXPECT_TRUE(is_subset(multi[t - 1].clusters[i], multi[t].clusters[i]));
      }
    }
  }
}

CenterGroup group_with_counts(std::uint64_t weight, const std::vector<double>& counts) {
  CenterGroup g;
  g.sketch = MGSketch(counts.size() + 1);
  g.weight = weight;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] > 0) g.sketch.insert(static_cast<RightId>(j), counts[j]);
  }
  return g;
}

TEST(EstimateTheta, BimodalCountersSplitInTheMiddle) {
  const std::vector<CenterGroup> groups{group_with_counts(40, std::vector<double>(6, 40.0)),
                                        group_with_counts(25, std::vector<double>(3, 25.0))};
  const auto est = estimate_theta(groups);
  EXPECT_FALSE(est.fallback);
  EXPECT_EQ(est.p_hat, 0.95);
  EXPECT_EQ(est.q_hat, 0.05);
  EXPECT_NEAR(est.theta, 0.5, 1e-12);
}

TEST(EstimateTheta, MonteCarloSeparatesMembers) {
  SplitMix64 rng(8);
  const std::uint64_t weight = 200;
  std::vector<CenterGroup> groups;
  std::vector<std::vector<bool>> member;
  for (int g = 0; g < 10; ++g) {
    std::vector<double> counts;
    std::vector<bool> is_member;
    for (int j = 0; j < 100; ++j) {
      const bool m = j < 30;
      const double prob = m ? 0.8 : 0.05;
      double c = 0;
      for (std::uint64_t t = 0; t < weight; ++t) c += rng.uniform() < prob ? 1.0 : 0.0;
      counts.push_back(c);
      is_member.push_back(m);
    }
    groups.push_back(group_with_counts(weight, counts));
    member.push_back(is_member);
  }
  const auto est = estimate_theta(groups);
  ASSERT_FALSE(est.fallback);
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t j = 0; j < member[g].size(); ++j) {
      const bool predicted =
          groups[g].sketch.estimate(static_cast<RightId>(j)) >= est.theta * static_cast<double>(weight);
      correct += predicted == member[g][j] ? 1 : 0;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(correct), 0.99 * static_cast<double>(total));
}

TEST(EstimateTheta, SingleCounterFallsBack) {
  const std::vector<CenterGroup> groups{group_with_counts(10, {7.0})};
  const auto est = estimate_theta(groups);
  EXPECT_TRUE(est.fallback);
  EXPECT_EQ(est.theta, 0.5);
  EXPECT_TRUE(estimate_theta(std::vector<CenterGroup>{}).fallback);
}

TEST(EstimateTheta, GridIsTwentieths) {
  const auto grid = default_probability_grid();
  ASSERT_EQ(grid.size(), 19u);
  EXPECT_EQ(grid.front(), 0.05);
  EXPECT_EQ(grid.back(), 0.95);
}

PlantedParams planted(double p, std::uint64_t seed) {
  PlantedParams params;
  params.n = 3000;
  params.k = 15;
  params.ell = 100;
  params.r = 30;
  params.p = p;
  params.seed = seed;
  return params;
}

double best_quality(const std::vector<ThetaClusters>& runs, const GroundTruth& truth) {
  double best = 0.0;
  for (const auto& t : runs) best = std::max(best, quality(truth.right, t.clusters));
  return best;
}

TEST(SofaEndToEnd, HighSignalRecoversRightSets) {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto params = planted(0.9, seed);
    PlantedInstance inst = generate_planted(params);
    SofaConfig cfg = config_for(params.k, 0, default_sketch_capacity(50, params.n), seed);
    const auto r = sofa_pass(inst.stream, cfg);
    const auto runs = multi_threshold(r.centers, cfg, kDefaultThetaGrid);
    EXPECT_GE(best_quality(runs, inst.truth), 0.85) << "seed " << seed;
  }
}

TEST(SofaEndToEnd, CloseToStaticBaseline) {
  const auto params = planted(0.7, 3);
  PlantedInstance inst = generate_planted(params);
  SofaConfig cfg = config_for(params.k, 0, default_sketch_capacity(50, params.n), 3);
  const auto r = sofa_pass(inst.stream, cfg);
  const double streaming = best_quality(multi_threshold(r.centers, cfg, kDefaultThetaGrid), inst.truth);
  const auto grouping = static_grouping(inst.stream.records(), params.n, params.k,
                                        cfg.metric, 3);
  double offline = 0.0;
  for (double theta : kDefaultThetaGrid) {
    offline = std::max(offline, quality(inst.truth.right, threshold_groups(grouping.groups, theta)));
  }
  EXPECT_GE(streaming, offline - 0.15);
}

}  // namespace
}  // namespace sofa
