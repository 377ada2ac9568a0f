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
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "sofa/sparse_vector.hpp"

namespace sofa {

using LeftId = std::uint64_t;

// One left vertex with all of its incident edges.
struct Record {
  LeftId id = 0;
  SparseBinaryVector row;

  friend bool operator==(const Record&, const Record&) = default;
};

// Malformed input, ungrouped edge lists, pass-budget violations.
class StreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Replayable source of left-vertex records. A source may be read at most
// twice; both passes yield the same record sequence.
class StreamSource {
 public:
  static constexpr int kMaxPasses = 2;

  virtual ~StreamSource() = default;

  std::size_t universe() const { return universe_; }
  // Known up front when declared by the source, otherwise after one
  // complete pass.
  std::optional<std::size_t> left_count() const { return left_count_; }
  int passes_taken() const { return passes_taken_; }

  // Starts the next pass. Throws StreamError once the budget is spent.
  void begin_pass();

  // Fills `out` with the next record of the current pass; false at the end.
  bool next(Record& out);

 protected:
  explicit StreamSource(std::size_t universe,
                        std::optional<std::size_t> left_count = std::nullopt)
      : universe_(universe), left_count_(left_count) {}

  virtual void rewind() = 0;
  virtual bool read_next(Record& out) = 0;

  void set_universe(std::size_t n) { universe_ = n; }
  void set_left_count(std::size_t m) { left_count_ = m; }

 private:
  std::size_t universe_;
  std::optional<std::size_t> left_count_;
  int passes_taken_ = 0;
  bool in_pass_ = false;
  std::size_t seen_in_pass_ = 0;
};

class MemoryStream final : public StreamSource {
 public:
  MemoryStream(std::size_t universe, std::vector<Record> records);

  std::span<const Record> records() const { return records_; }

 protected:
  void rewind() override { pos_ = 0; }
  bool read_next(Record& out) override;

 private:
  std::vector<Record> records_;
  std::size_t pos_ = 0;
};

enum class InputFormat { kAdjacency, kEdgeList };

InputFormat parse_input_format(const std::string& name);

// Text formats, UTF-8 with LF line endings:
//
//   adjacency  optional header "%sofa n=<n> [m=<m>]", then one line per left
//              vertex (id = line number after the header) listing its right
//              ids; a blank line is a degree-0 vertex.
//   edge-list  optional header, then "<left> <right>" per line; all edges of
//              a left vertex must be contiguous.
//
// The universe size comes from the header or `universe`; if both are given
// they must agree.
class FileStream final : public StreamSource {
 public:
  FileStream(const std::filesystem::path& path, InputFormat format,
             std::optional<std::size_t> universe = std::nullopt);

  InputFormat format() const { return format_; }

 protected:
  void rewind() override;
  bool read_next(Record& out) override;

 private:
  bool read_adjacency(Record& out);
  bool read_edge_list(Record& out);
  [[noreturn]] void fail(const std::string& what) const;

  std::filesystem::path path_;
  InputFormat format_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::size_t body_start_line_ = 0;
  std::streampos body_start_;
  std::optional<std::size_t> declared_m_;
  std::size_t records_read_ = 0;

  // Edge-list state.
  bool has_pending_ = false;
  LeftId pending_left_ = 0;
  RightId pending_right_ = 0;
  std::unordered_set<LeftId> finished_left_;
};

// Decorator that, on the first pass, reads up to `prefix` records ahead so
// that statistics over them are available before they are handed out.
class PrefixBufferedStream final : public StreamSource {
 public:
  PrefixBufferedStream(StreamSource& inner, std::size_t prefix);

  // Reads the prefix ahead of the first pass, which then replays it.
  std::span<const Record> prefix_records();

 protected:
  void rewind() override;
  bool read_next(Record& out) override;

 private:
  void fill();

  StreamSource& inner_;
  std::size_t prefix_;
  std::vector<Record> buffer_;
  std::size_t buffer_pos_ = 0;
  bool buffered_ = false;
  // The inner pass ended while filling the buffer.
  bool inner_done_ = false;
};

// Nearest-rank percentile of row degrees (q in (0, 1]); 0 for no records.
std::size_t degree_percentile(std::span<const Record> records, double q);

void write_adjacency(const std::filesystem::path& path, std::size_t universe,
                     std::span<const Record> records);
// Consumes one pass of `source`; records must arrive with ids 0, 1, 2, ...
void write_adjacency(const std::filesystem::path& path, StreamSource& source);

enum class LeftMode { kBicluster, kBmf };

std::string to_string(LeftMode mode);
LeftMode parse_left_mode(const std::string& name);

struct RunParameters {
  std::string algorithm;
  double theta = 0.0;
  double alpha = 1.0;
  std::size_t cmax = 0;
  std::size_t capacity = 0;
  std::uint64_t seed = 0;
  std::size_t peak_memory_entries = 0;

  friend bool operator==(const RunParameters&, const RunParameters&) = default;
};

struct LeftAssignment {
  LeftId id = 0;
  std::vector<std::uint32_t> clusters;  // ascending

  friend bool operator==(const LeftAssignment&, const LeftAssignment&) = default;
};

struct ClusteringArtifact {
  LeftMode mode = LeftMode::kBicluster;
  std::size_t universe = 0;
  std::vector<IndexSet> right_clusters;
  std::vector<LeftAssignment> left;
  RunParameters params;

  std::size_t k() const { return right_clusters.size(); }

  // Throws std::invalid_argument on out-of-range ids, unsorted sets, or a
  // bicluster vertex with more than one cluster.
  void validate() const;

  friend bool operator==(const ClusteringArtifact&,
                         const ClusteringArtifact&) = default;
};

enum class ArtifactFormat { kTsv, kJson };

ArtifactFormat parse_artifact_format(const std::string& name);

void write_artifact(const ClusteringArtifact& artifact,
                    const std::filesystem::path& path, ArtifactFormat format);
std::string format_artifact(const ClusteringArtifact& artifact,
                            ArtifactFormat format);
// Format detected from content.
ClusteringArtifact read_artifact(const std::filesystem::path& path);
ClusteringArtifact parse_artifact(const std::string& text);

// Planted ground truth sidecar: right clusters and per-left-vertex cluster.
struct GroundTruthFile {
  std::size_t universe = 0;
  std::vector<IndexSet> right_clusters;
  std::vector<std::uint32_t> left_cluster;  // indexed by left id

  friend bool operator==(const GroundTruthFile&, const GroundTruthFile&) = default;
};

void write_ground_truth(const GroundTruthFile& truth,
                        const std::filesystem::path& path);
GroundTruthFile read_ground_truth(const std::filesystem::path& path);

// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace sofa
