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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "sofa/rng.hpp"

namespace sofa {
namespace {

// Textbook unit-weight Misra-Gries, one decrement at a time.
class ClassicMG {
 public:
  explicit ClassicMG(std::size_t capacity) : capacity_(capacity) {}

  void insert(RightId item) {
    if (auto it = counters_.find(item); it != counters_.end()) {
      ++it->second;
    } else if (counters_.size() < capacity_) {
      counters_[item] = 1;
    } else {
      for (auto it2 = counters_.begin(); it2 != counters_.end();) {
        if (--it2->second == 0) {
          it2 = counters_.erase(it2);
        } else {
          ++it2;
        }
      }
    }
  }

  double estimate(RightId item) const {
    auto it = counters_.find(item);
    return it == counters_.end() ? 0.0 : static_cast<double>(it->second);
  }

 private:
  std::size_t capacity_;
  std::map<RightId, long> counters_;
};

void expect_bounds(const MGSketch& sk, const std::map<RightId, double>& freq) {
  const double slack = sk.total_weight() / static_cast<double>(sk.capacity() + 1);
  for (const auto& [item, f] : freq) {
    const double est = sk.estimate(item);
    EXPECT_LE(est, f + 1e-9) << "item " << item;
    EXPECT_GE(est, f - slack - 1e-9) << "item " << item;
  }
  EXPECT_LE(sk.size(), sk.capacity());
  EXPECT_GE(sk.total_weight() + 1e-9, sk.counter_sum());
  for (const auto& [item, value] : sk.entries()) EXPECT_GT(value, 0.0);
}

TEST(MGSketch, NewSketchIsEmpty) {
  MGSketch sk(8);
  EXPECT_EQ(sk.size(), 0u);
  EXPECT_EQ(sk.total_weight(), 0.0);
  EXPECT_NO_THROW(MGSketch(1));
  EXPECT_THROW(MGSketch(0), std::invalid_argument);
}

TEST(MGSketch, RepeatedItemIsExact) {
  MGSketch sk(2);
  for (int i = 0; i < 5; ++i) sk.insert(7);
  EXPECT_EQ(sk.estimate(7), 5.0);
}

TEST(MGSketch, CapacityOneStreamOfThree) {
  MGSketch sk(1);
  ClassicMG classic(1);
  for (RightId item : {0u, 1u, 2u}) {
    sk.insert(item);
    classic.insert(item);
  }
  for (RightId item : {0u, 1u, 2u}) {
    EXPECT_EQ(sk.estimate(item), classic.estimate(item));
    EXPECT_GE(sk.estimate(item), 1.0 - 1.5);
    EXPECT_LE(sk.estimate(item), 1.0);
  }
}

TEST(MGSketch, RejectsNonPositiveWeights) {
  MGSketch sk(4);
  EXPECT_THROW(sk.insert(1, 0.0), std::invalid_argument);
  EXPECT_THROW(sk.insert(1, -1.0), std::invalid_argument);
  EXPECT_THROW(sk.insert(1, std::numeric_limits<double>::infinity()), std::invalid_argument);
  EXPECT_THROW(sk.insert(1, std::nan("")), std::invalid_argument);
}

TEST(MGSketch, UntrackedItemEstimatesZero) {
  MGSketch sk(4);
  sk.insert(3);
  EXPECT_EQ(sk.estimate(9), 0.0);
}

TEST(MGSketch, SoleItemEstimateIsTotalWeight) {
  MGSketch sk(3);
  sk.insert(2, 2.0);
  sk.insert(2, 3.0);
  EXPECT_EQ(sk.estimate(2), 5.0);
  EXPECT_EQ(sk.total_weight(), 5.0);
}

TEST(MGSketch, AdversarialEqualFrequencies) {
  for (std::size_t capacity : {1u, 3u, 8u}) {
    MGSketch sk(capacity);
    std::map<RightId, double> freq;
    for (int round = 0; round < 20; ++round) {
      for (RightId item = 0; item <= capacity; ++item) {
        sk.insert(item);
        freq[item] += 1.0;
      }
    }
    expect_bounds(sk, freq);
  }
}

TEST(MGSketch, EntriesSortedById) {
  MGSketch sk(4);
  EXPECT_TRUE(sk.entries().empty());
  sk.insert(3, 2.0);
  sk.insert(1, 1.0);
  const auto e = sk.entries();
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0], (MGSketch::Entry{1, 1.0}));
  EXPECT_EQ(e[1], (MGSketch::Entry{3, 2.0}));
}

TEST(MGSketch, UnitWeightsMatchClassicAlgorithm) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t capacity = 1 + rng.below(8);
    MGSketch sk(capacity);
    ClassicMG classic(capacity);
    const std::size_t len = 1 + rng.below(400);
    const std::size_t alphabet = 1 + rng.below(20);
    for (std::size_t t = 0; t < len; ++t) {
      const auto item = static_cast<RightId>(rng.below(alphabet));
      sk.insert(item);
      classic.insert(item);
      for (RightId a = 0; a < alphabet; ++a) {
        ASSERT_EQ(sk.estimate(a), classic.estimate(a)) << "trial " << trial << " t " << t;
      }
    }
  }
}

TEST(MGSketch, WeightedBoundEveryPrefix) {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t capacity = std::size_t{1} << (2 * rng.below(4));
    MGSketch sk(capacity);
    std::map<RightId, double> freq;
    const std::size_t len = 1 + rng.below(500);
    for (std::size_t t = 0; t < len; ++t) {
      // Skewed alphabet so that some items are heavy.
      const auto item = static_cast<RightId>(rng.below(1 + rng.below(40)));
      const double w = static_cast<double>(1 + rng.below(5));
      sk.insert(item, w);
      freq[item] += w;
      expect_bounds(sk, freq);
    }
  }
}

TEST(MGSketch, MergeWithEmptyIsIdentity) {
  MGSketch s(4);
  for (RightId i : {1u, 2u, 2u, 5u, 7u, 9u, 2u}) s.insert(i);
  const MGSketch m = merged(MGSketch(4), s);
  EXPECT_EQ(m.entries(), s.entries());
  EXPECT_EQ(m.total_weight(), s.total_weight());
}

TEST(MGSketch, MergeSumsSharedItem) {
  MGSketch a(2);
  MGSketch b(2);
  a.insert(0, 3.0);
  b.insert(0, 4.0);
  EXPECT_EQ(merged(a, b).estimate(0), 7.0);
}

TEST(MGSketch, MergeCapacityMismatchThrows) {
  MGSketch a(2);
  EXPECT_THROW(a.merge(MGSketch(3)), std::invalid_argument);
}

TEST(MGSketch, MergedRandomStreamsKeepCombinedBound) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    MGSketch a(16);
    MGSketch b(16);
    std::map<RightId, double> freq;
    for (MGSketch* sk : {&a, &b}) {
      const std::size_t len = rng.below(600);
      for (std::size_t t = 0; t < len; ++t) {
        const auto item = static_cast<RightId>(rng.below(1 + rng.below(60)));
        const double w = static_cast<double>(1 + rng.below(3));
        sk->insert(item, w);
        freq[item] += w;
      }
    }
    const MGSketch m = merged(a, b);
    EXPECT_EQ(m.total_weight(), a.total_weight() + b.total_weight());
    expect_bounds(m, freq);
  }
}

TEST(MGSketch, MergeOrderPreservesTotalsAndBound) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MGSketch> parts(4, MGSketch(4));
    std::map<RightId, double> freq;
    for (auto& sk : parts) {
      for (int t = 0; t < 100; ++t) {
        const auto item = static_cast<RightId>(rng.below(12));
        sk.insert(item);
        freq[item] += 1.0;
      }
    }
    const MGSketch left = merged(merged(merged(parts[0], parts[1]), parts[2]), parts[3]);
    const MGSketch right = merged(parts[3], merged(parts[2], merged(parts[1], parts[0])));
    EXPECT_EQ(left.total_weight(), right.total_weight());
    expect_bounds(left, freq);
    expect_bounds(right, freq);
    const double slack = left.total_weight() / 5.0;
    for (const auto& [item, f] : freq) {
      EXPECT_LE(std::abs(left.estimate(item) - right.estimate(item)), slack + 1e-9);
    }
  }
}

TEST(MGSketch, LargeCapacityIsExact) {
  MGSketch sk(1000);
  std::map<RightId, double> freq;
  SplitMix64 rng(9);
  for (int t = 0; t < 5000; ++t) {
    const auto item = static_cast<RightId>(rng.below(500));
    sk.insert(item);
    freq[item] += 1.0;
  }
  for (const auto& [item, f] : freq) EXPECT_EQ(sk.estimate(item), f);
}

TEST(HeavyItems, ThresholdIsInclusive) {
  MGSketch sk(8);
  sk.insert(1, 80.0);
  sk.insert(2, 49.0);
  sk.insert(3, 50.0);
  EXPECT_EQ(heavy_items(sk, 50.0), (IndexSet{1, 3}));
  EXPECT_TRUE(heavy_items(sk, 81.0).empty());
}

}  // namespace
}  // namespace sofa
