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

#include "sofa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "sofa/rng.hpp"

namespace sofa {
namespace {

// Sub-stream tags for counter_bits.
constexpr std::uint64_t kRightSets = 1;
constexpr std::uint64_t kOrder = 2;
constexpr std::uint64_t kRows = 3;

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

// r distinct ids of [0, n), ascending, by a partial Fisher-Yates over a
// sparse permutation.
IndexSet sample_without_replacement(std::size_t n, std::size_t r, SplitMix64& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> swapped;  // position -> value
  auto value_at = [&](std::size_t pos) {
    for (const auto& [p, v] : swapped) {
      if (p == pos) return v;
    }
    return pos;
  };
  auto set_at = [&](std::size_t pos, std::size_t value) {
    for (auto& [p, v] : swapped) {
      if (p == pos) {
        v = value;
        return;
      }
    }
    swapped.emplace_back(pos, value);
  };
  IndexSet out;
  out.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t j = i + rng.below(n - i);
    const std::size_t vj = value_at(j);
    set_at(j, value_at(i));
    out.push_back(static_cast<RightId>(vj));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double PlantedParams::noise_probability() const {
  if (q) return *q;
  if (!noise_degree || n == r) return 0.0;
  return *noise_degree / static_cast<double>(n - r);
}

void PlantedParams::validate() const {
  if (q && noise_degree) {
    throw std::invalid_argument("give either q or a noise degree, not both");
  }
  if (n == 0 || k == 0) throw std::invalid_argument("n and k must be positive");
  if (r > n) throw std::invalid_argument("r must not exceed n");
  if (n > (std::size_t{1} << 32)) throw std::invalid_argument("n too large");
  if (disjoint_right && k * r > n) {
    throw std::invalid_argument("disjoint right sets need k * r <= n");
  }
  if (noise_degree && !(*noise_degree >= 0.0)) {
    throw std::invalid_argument("noise degree must be nonnegative");
  }
  const double qq = noise_probability();
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (!(qq >= 0.0 && qq < p)) throw std::invalid_argument("need 0 <= q < p");
}

std::vector<IndexSet> GroundTruth::left_clusters() const {
  std::vector<IndexSet> out(right.size());
  for (std::size_t u = 0; u < left_cluster.size(); ++u) {
    out[left_cluster[u]].push_back(static_cast<RightId>(u));
  }
  return out;
}

GroundTruthFile GroundTruth::to_file() const {
  return GroundTruthFile{universe, right, left_cluster};
}

PlantedStream::PlantedStream(const PlantedParams& params)
    : StreamSource(params.n, params.left_count()), params_(params) {
  params_.validate();
  q_ = params_.noise_probability();
  truth_.universe = params_.n;

  SplitMix64 right_rng(counter_bits(params_.seed, kRightSets, 0));
  if (params_.disjoint_right) {
    std::vector<RightId> perm(params_.n);
    std::iota(perm.begin(), perm.end(), 0);
    shuffle(perm, right_rng);
    for (std::size_t i = 0; i < params_.k; ++i) {
      IndexSet v(perm.begin() + i * params_.r, perm.begin() + (i + 1) * params_.r);
      std::sort(v.begin(), v.end());
      truth_.right.push_back(std::move(v));
    }
  } else {
    for (std::size_t i = 0; i < params_.k; ++i) {
      truth_.right.push_back(sample_without_replacement(params_.n, params_.r, right_rng));
    }
  }

  truth_.left_cluster.resize(params_.left_count());
  for (std::size_t u = 0; u < truth_.left_cluster.size(); ++u) {
    truth_.left_cluster[u] = static_cast<std::uint32_t>(u / params_.ell);
  }
  if (params_.shuffle) {
    SplitMix64 order_rng(counter_bits(params_.seed, kOrder, 0));
    shuffle(truth_.left_cluster, order_rng);
  }
}

SparseBinaryVector PlantedStream::row(std::size_t id) const {
  const IndexSet& v = truth_.right[truth_.left_cluster.at(id)];
  SplitMix64 rng(counter_bits(params_.seed, kRows, id));
  IndexSet signal;
  for (RightId j : v) {
    if (rng.uniform() < params_.p) signal.push_back(j);
  }
  IndexSet noise;
  const std::size_t complement = params_.n - v.size();
  if (q_ > 0.0 && complement > 0) {
    // Geometric skips over positions of the complement of v.
    const double log_miss = std::log1p(-q_);
    std::size_t ptr = 0;
    std::size_t pos = 0;
    bool first = true;
    for (;;) {
      std::size_t gap = 0;
      if (q_ < 1.0) {
        const double u = 1.0 - rng.uniform();  // (0, 1]
        const double g = std::floor(std::log(u) / log_miss);
        if (g >= static_cast<double>(complement)) break;
        gap = static_cast<std::size_t>(g);
      }
      pos = first ? gap : pos + gap + 1;
      first = false;
      if (pos >= complement) break;
      // Map complement position to id: skip the members of v at or below it.
      std::size_t id_candidate = pos + ptr;
      while (ptr < v.size() && v[ptr] <= id_candidate) {
        ++ptr;
        ++id_candidate;
      }
      noise.push_back(static_cast<RightId>(id_candidate));
    }
  }
  IndexSet merged;
  merged.reserve(signal.size() + noise.size());
  std::merge(signal.begin(), signal.end(), noise.begin(), noise.end(),
             std::back_inserter(merged));
  return SparseBinaryVector(params_.n, std::move(merged));
}

bool PlantedStream::read_next(Record& out) {
  if (pos_ >= truth_.left_cluster.size()) return false;
  out.id = pos_;
  out.row = row(pos_);
  ++pos_;
  return true;
}

PlantedInstance generate_planted(const PlantedParams& params) {
  PlantedStream source(params);
  std::vector<Record> records;
  records.reserve(params.left_count());
  for (std::size_t u = 0; u < params.left_count(); ++u) {
    records.push_back({u, source.row(u)});
  }
  return {MemoryStream(params.n, std::move(records)), source.truth()};
}

}  // namespace sofa
