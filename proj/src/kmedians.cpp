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

#include "sofa/kmedians.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sofa/center.hpp"
#include "sofa/rng.hpp"

namespace sofa {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distances from one medoid to every point, via the overlap index.
class DistanceRows {
 public:
  DistanceRows(std::span<const SparseBinaryVector> points, const DistanceMetric& metric)
      : points_(points), metric_(metric), index_(points.front().universe()) {
    for (const auto& p : points) index_.add(p);
  }

  void row(std::size_t medoid, std::vector<double>& out) {
    const auto overlap = index_.overlaps(points_[medoid]);
    const std::size_t medoid_size = points_[medoid].size();
    out.resize(points_.size());
    for (std::size_t o = 0; o < points_.size(); ++o) {
      out[o] = metric_.combine(medoid_size - overlap[o], points_[o].size() - overlap[o]);
    }
  }

 private:
  std::span<const SparseBinaryVector> points_;
  DistanceMetric metric_;
  OverlapIndex index_;
};

struct NearestTwo {
  std::vector<std::uint32_t> first;
  std::vector<double> d1;
  std::vector<double> d2;
};

void nearest_two(const std::vector<std::vector<double>>& rows, std::size_t m,
                 NearestTwo& out) {
  out.first.assign(m, 0);
  out.d1.assign(m, kInf);
  out.d2.assign(m, kInf);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t o = 0; o < m; ++o) {
      const double d = rows[j][o];
      if (d < out.d1[o]) {
        out.d2[o] = out.d1[o];
        out.d1[o] = d;
        out.first[o] = static_cast<std::uint32_t>(j);
      } else if (d < out.d2[o]) {
        out.d2[o] = d;
      }
    }
  }
}

double weighted_sum(std::span<const double> weights, const std::vector<double>& d) {
  double total = 0.0;
  for (std::size_t o = 0; o < d.size(); ++o) total += weights[o] * d[o];
  return total;
}

void validate(std::span<const SparseBinaryVector> points,
              std::span<const double> weights, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (points.empty()) throw std::invalid_argument("k-medians needs at least one point");
  if (weights.size() != points.size()) {
    throw std::invalid_argument("one weight per point required");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
  }
  for (const auto& p : points) require_same_universe(p, points.front());
}

}  // namespace

double kmedians_cost(std::span<const SparseBinaryVector> points,
                     std::span<const double> weights,
                     std::span<const std::size_t> medoids,
                     const DistanceMetric& metric) {
  double total = 0.0;
  for (std::size_t o = 0; o < points.size(); ++o) {
    double best = kInf;
    for (std::size_t c : medoids) {
      best = std::min(best, asym_hamming(points[c], points[o], metric));
    }
    total += weights[o] * best;
  }
  return total;
}

KMediansResult kmedians_local_search(std::span<const SparseBinaryVector> points,
                                     std::span<const double> weights,
                                     std::size_t k, const DistanceMetric& metric,
                                     std::uint64_t seed,
                                     const KMediansOptions& options) {
  validate(points, weights, k);
  const std::size_t m = points.size();
  KMediansResult result;
  result.groups.resize(k);

  if (k >= m) {
    result.medoids.resize(m);
    std::iota(result.medoids.begin(), result.medoids.end(), 0);
    result.assignment.resize(m);
    for (std::size_t o = 0; o < m; ++o) {
      result.assignment[o] = static_cast<std::uint32_t>(o);
      result.groups[o].push_back(o);
    }
    return result;
  }

  DistanceRows distances(points, metric);
  SplitMix64 rng(seed);
  std::vector<std::size_t> medoids;
  std::vector<std::vector<double>> rows;
  std::vector<char> is_medoid(m, 0);

  // Farthest-point seeding.
  {
    std::size_t next = rng.below(m);
    std::vector<double> closest(m, kInf);
    while (medoids.size() < k) {
      medoids.push_back(next);
      is_medoid[next] = 1;
      rows.emplace_back();
      distances.row(next, rows.back());
      for (std::size_t o = 0; o < m; ++o) closest[o] = std::min(closest[o], rows.back()[o]);
      double far = -1.0;
      for (std::size_t o = 0; o < m; ++o) {
        if (!is_medoid[o] && closest[o] > far) {
          far = closest[o];
          next = o;
        }
      }
    }
  }

  NearestTwo near;
  nearest_two(rows, m, near);
  double cost = weighted_sum(weights, near.d1);

  std::vector<std::size_t> candidates;
  std::vector<double> cand_row;
  std::vector<double> correction(k);
  bool improved = true;
  while (improved && cost > 0.0) {
    improved = false;
    candidates.clear();
    for (std::size_t o = 0; o < m; ++o) {
      if (!is_medoid[o]) candidates.push_back(o);
    }
    for (std::size_t i = candidates.size(); i > 1; --i) {
      std::swap(candidates[i - 1], candidates[rng.below(i)]);
    }
    if (options.max_candidates_per_sweep > 0 &&
        candidates.size() > options.max_candidates_per_sweep) {
      candidates.resize(options.max_candidates_per_sweep);
    }

    for (std::size_t x : candidates) {
      if (is_medoid[x]) continue;
      distances.row(x, cand_row);
      // Change from adding x alone, plus per-slot corrections for the
      // points that lose their nearest medoid when that slot is removed.
      double gain_add = 0.0;
      std::fill(correction.begin(), correction.end(), 0.0);
      for (std::size_t o = 0; o < m; ++o) {
        const double with_x = std::min(cand_row[o], near.d1[o]);
        gain_add += weights[o] * (with_x - near.d1[o]);
        correction[near.first[o]] +=
            weights[o] * (std::min(cand_row[o], near.d2[o]) - with_x);
      }
      std::size_t slot = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (correction[j] < correction[slot]) slot = j;
      }
      const double new_cost = cost + gain_add + correction[slot];
      if (!(new_cost < (1.0 - options.min_relative_improvement) * cost)) continue;

      is_medoid[medoids[slot]] = 0;
      is_medoid[x] = 1;
      medoids[slot] = x;
      rows[slot] = cand_row;
      nearest_two(rows, m, near);
      cost = weighted_sum(weights, near.d1);
      ++result.swaps;
      improved = true;
      if (cost == 0.0) break;
    }
  }

  // Canonical order: medoids ascending, ties to the lowest medoid.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return medoids[a] < medoids[b]; });
  result.medoids.resize(k);
  result.assignment.assign(m, 0);
  result.cost = 0.0;
  for (std::size_t o = 0; o < m; ++o) {
    double best = kInf;
    for (std::size_t g = 0; g < k; ++g) {
      const double d = rows[order[g]][o];
      if (d < best) {
        best = d;
        result.assignment[o] = static_cast<std::uint32_t>(g);
      }
    }
    result.cost += weights[o] * best;
    result.groups[result.assignment[o]].push_back(o);
  }
  for (std::size_t g = 0; g < k; ++g) result.medoids[g] = medoids[order[g]];
  return result;
}

}  // namespace sofa
