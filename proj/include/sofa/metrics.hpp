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

#include <cstdint>
#include <span>
#include <vector>

#include "sofa/sparse_vector.hpp"
#include "sofa/stream_io.hpp"

namespace sofa {

// |a ∩ b| / |a ∪ b| for sorted sets; two empty sets give 1.
double jaccard(std::span<const RightId> a, std::span<const RightId> b);

// Mean over ground-truth sets of the best Jaccard match among `found`.
// Throws std::invalid_argument when `ground` is empty.
double quality(std::span<const IndexSet> ground, std::span<const IndexSet> found);

struct ReconstructionStats {
  std::uint64_t edges = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t covered = 0;
  // 1 - mismatches / edges; negative when the reconstruction adds more
  // spurious ones than there are edges.
  double gain = 0.0;
  double recall = 0.0;
};

// Compares each row with the union of its clusters, one row at a time.
class ReconstructionAccumulator {
 public:
  explicit ReconstructionAccumulator(std::span<const IndexSet> clusters)
      : clusters_(clusters) {}

  void add(const SparseBinaryVector& row, std::span<const std::uint32_t> membership);

  // Throws std::domain_error when no edges were seen.
  ReconstructionStats finish() const;

 private:
  std::span<const IndexSet> clusters_;
  ReconstructionStats stats_;
  IndexSet scratch_;
};

// Consumes one pass; `membership` lists the stream's records in order.
ReconstructionStats reconstruction_stats(StreamSource& stream,
                                         std::span<const LeftAssignment> membership,
                                         std::span<const IndexSet> clusters);

}  // namespace sofa
