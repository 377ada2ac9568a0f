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

#include "sofa/stream_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string_view>

#include "json.hpp"

namespace sofa {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
std::optional<T> parse_number(std::string_view token) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

template <typename T>
T require_number(std::string_view token, const std::string& what) {
  auto v = parse_number<T>(token);
  if (!v) throw StreamError("invalid " + what + ": '" + std::string(token) + "'");
  return *v;
}

double require_double(std::string_view token, const std::string& what) {
  // from_chars for double is available in libstdc++ 11.
  return require_number<double>(token, what);
}

struct Header {
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
};

bool parse_header(std::string_view line, Header& header) {
  auto tokens = split_ws(line);
  if (tokens.empty() || tokens[0] != "%sofa") return false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) {
      throw StreamError("malformed header token '" + std::string(tokens[i]) + "'");
    }
    const auto key = tokens[i].substr(0, eq);
    const auto value = tokens[i].substr(eq + 1);
    if (key == "n") {
      header.n = require_number<std::size_t>(value, "header n");
    } else if (key == "m") {
      header.m = require_number<std::size_t>(value, "header m");
    } else {
      throw StreamError("unknown header key '" + std::string(key) + "'");
    }
  }
  return true;
}

std::string join_ids(std::span<const RightId> ids, char sep) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// StreamSource

void StreamSource::begin_pass() {
  if (passes_taken_ >= kMaxPasses) {
    throw StreamError("stream pass budget exhausted (at most " +
                      std::to_string(kMaxPasses) + " passes)");
  }
  rewind();
  ++passes_taken_;
  in_pass_ = true;
  seen_in_pass_ = 0;
}

bool StreamSource::next(Record& out) {
  if (!in_pass_) throw StreamError("next() called outside of a pass");
  if (!read_next(out)) {
    in_pass_ = false;
    if (left_count_ && *left_count_ != seen_in_pass_) {
      throw StreamError("stream yielded " + std::to_string(seen_in_pass_) +
                        " records, expected " + std::to_string(*left_count_));
    }
    left_count_ = seen_in_pass_;
    return false;
  }
  if (out.row.universe() != universe_) {
    throw StreamError("record universe does not match stream universe");
  }
  ++seen_in_pass_;
  return true;
}

MemoryStream::MemoryStream(std::size_t universe, std::vector<Record> records)
    : StreamSource(universe, records.size()), records_(std::move(records)) {
  for (const auto& r : records_) {
    if (r.row.universe() != universe) {
      throw std::invalid_argument("record universe does not match stream");
    }
  }
}

bool MemoryStream::read_next(Record& out) {
  if (pos_ >= records_.size()) return false;
  out = records_[pos_++];
  return true;
}

InputFormat parse_input_format(const std::string& name) {
  if (name == "adjacency" || name == "adj") return InputFormat::kAdjacency;
  if (name == "edge-list" || name == "edges") return InputFormat::kEdgeList;
  throw std::invalid_argument("unknown input format '" + name + "'");
}

// ---------------------------------------------------------------------------
// FileStream

FileStream::FileStream(const std::filesystem::path& path, InputFormat format,
                       std::optional<std::size_t> universe)
    : StreamSource(0), path_(path), format_(format), in_(path) {
  if (!in_) throw StreamError("cannot open " + path.string());
  Header header;
  body_start_ = in_.tellg();
  if (std::getline(in_, line_)) {
    bool has_header = false;
    try {
      has_header = parse_header(line_, header);
    } catch (const StreamError& e) {
      fail(e.what());
    }
    if (has_header) {
      body_start_ = in_.tellg();
      body_start_line_ = 1;
    }
  }
  in_.clear();

  if (header.n && universe && *header.n != *universe) {
    throw StreamError(path.string() + ": header n=" + std::to_string(*header.n) +
                      " conflicts with requested n=" + std::to_string(*universe));
  }
  const auto n = header.n ? header.n : universe;
  if (!n) {
    throw StreamError(path.string() +
                      ": universe size unknown (add a %sofa header or pass n)");
  }
  set_universe(*n);
  declared_m_ = header.m;
  if (header.m) set_left_count(*header.m);
}

void FileStream::rewind() {
  in_.clear();
  in_.seekg(body_start_);
  line_no_ = body_start_line_;
  records_read_ = 0;
  has_pending_ = false;
  finished_left_.clear();
}

bool FileStream::read_next(Record& out) {
  return format_ == InputFormat::kAdjacency ? read_adjacency(out)
                                            : read_edge_list(out);
}

void FileStream::fail(const std::string& what) const {
  throw StreamError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
}

bool FileStream::read_adjacency(Record& out) {
  if (!std::getline(in_, line_)) return false;
  ++line_no_;
  IndexSet ids;
  for (auto token : split_ws(line_)) {
    auto v = parse_number<RightId>(token);
    if (!v) fail("malformed right id '" + std::string(token) + "'");
    ids.push_back(*v);
  }
  try {
    out.row = SparseBinaryVector::from_unsorted(universe(), std::move(ids));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  out.id = records_read_++;
  return true;
}

bool FileStream::read_edge_list(Record& out) {
  auto read_edge = [this](LeftId& u, RightId& v) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      auto tokens = split_ws(line_);
      if (tokens.empty()) continue;
      if (tokens.size() != 2) fail("expected '<left> <right>'");
      auto left = parse_number<LeftId>(tokens[0]);
      auto right = parse_number<RightId>(tokens[1]);
      if (!left || !right) fail("malformed edge");
      u = *left;
      v = *right;
      return true;
    }
    return false;
  };

  if (!has_pending_) {
    if (!read_edge(pending_left_, pending_right_)) return false;
  }
  const LeftId current = pending_left_;
  IndexSet ids{pending_right_};
  has_pending_ = false;
  LeftId u;
  RightId v;
  while (read_edge(u, v)) {
    if (u == current) {
      ids.push_back(v);
    } else {
      pending_left_ = u;
      pending_right_ = v;
      has_pending_ = true;
      break;
    }
  }
  if (!finished_left_.insert(current).second) {
    fail("edge list is not grouped by left vertex (left id " +
         std::to_string(current) + " reappears)");
  }
  try {
    out.row = SparseBinaryVector::from_unsorted(universe(), std::move(ids));
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  out.id = current;
  ++records_read_;
  return true;
}

// ---------------------------------------------------------------------------
// PrefixBufferedStream

PrefixBufferedStream::PrefixBufferedStream(StreamSource& inner, std::size_t prefix)
    : StreamSource(inner.universe(), inner.left_count()),
      inner_(inner),
      prefix_(prefix) {}

std::span<const Record> PrefixBufferedStream::prefix_records() {
  if (!buffered_ && passes_taken() == 0) fill();
  return buffer_;
}

void PrefixBufferedStream::fill() {
  inner_.begin_pass();
  buffer_.clear();
  buffer_pos_ = 0;
  Record r;
  inner_done_ = false;
  while (buffer_.size() < prefix_) {
    if (!inner_.next(r)) {
      inner_done_ = true;
      break;
    }
    buffer_.push_back(r);
  }
  buffered_ = true;
}

void PrefixBufferedStream::rewind() {
  if (passes_taken() == 0) {
    // The first pass replays the buffer filled ahead of it.
    if (!buffered_) fill();
    buffer_pos_ = 0;
    return;
  }
  inner_.begin_pass();
  buffer_.clear();
  buffer_pos_ = 0;
  inner_done_ = false;
}

bool PrefixBufferedStream::read_next(Record& out) {
  if (buffer_pos_ < buffer_.size()) {
    out = buffer_[buffer_pos_++];
    return true;
  }
  return !inner_done_ && inner_.next(out);
}

std::size_t degree_percentile(std::span<const Record> records, double q) {
  if (records.empty()) return 0;
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("percentile out of range");
  std::vector<std::size_t> degrees;
  degrees.reserve(records.size());
  for (const auto& r : records) degrees.push_back(r.row.size());
  std::sort(degrees.begin(), degrees.end());
  const auto rank =
      static_cast<std::size_t>(std::ceil(q * static_cast<double>(degrees.size())));
  return degrees[std::max<std::size_t>(rank, 1) - 1];
}

void write_adjacency(const std::filesystem::path& path, std::size_t universe,
                     std::span<const Record> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StreamError("cannot write " + path.string());
  out << "%sofa n=" << universe << " m=" << records.size() << '\n';
  for (const auto& r : records) out << join_ids(r.row.indices(), ' ') << '\n';
  if (!out) throw StreamError("write failed: " + path.string());
}

void write_adjacency(const std::filesystem::path& path, StreamSource& source) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StreamError("cannot write " + path.string());
  out << "%sofa n=" << source.universe();
  if (source.left_count()) out << " m=" << *source.left_count();
  out << '\n';
  Record r;
  LeftId expected = 0;
  source.begin_pass();
  while (source.next(r)) {
    if (r.id != expected++) throw StreamError("adjacency output needs consecutive ids");
    out << join_ids(r.row.indices(), ' ') << '\n';
  }
  if (!out) throw StreamError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Artifacts

std::string to_string(LeftMode mode) {
  return mode == LeftMode::kBicluster ? "bicluster" : "bmf";
}

LeftMode parse_left_mode(const std::string& name) {
  if (name == "bicluster") return LeftMode::kBicluster;
  if (name == "bmf") return LeftMode::kBmf;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

ArtifactFormat parse_artifact_format(const std::string& name) {
  if (name == "tsv") return ArtifactFormat::kTsv;
  if (name == "json") return ArtifactFormat::kJson;
  throw std::invalid_argument("unknown artifact format '" + name + "'");
}

void ClusteringArtifact::validate() const {
  for (const auto& c : right_clusters) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] >= universe || (i > 0 && c[i - 1] >= c[i])) {
        throw std::invalid_argument("right cluster is not a sorted id set in [0, n)");
      }
    }
  }
  for (const auto& a : left) {
    if (mode == LeftMode::kBicluster && a.clusters.size() > 1) {
      throw std::invalid_argument("bicluster vertex assigned to several clusters");
    }
    for (std::size_t i = 0; i < a.clusters.size(); ++i) {
      if (a.clusters[i] >= k() || (i > 0 && a.clusters[i - 1] >= a.clusters[i])) {
        throw std::invalid_argument("left membership out of range or unsorted");
      }
    }
  }
  if (params.algorithm.find_first_of("\t\n") != std::string::npos) {
    throw std::invalid_argument("algorithm name contains whitespace control chars");
  }
}

std::string format_artifact(const ClusteringArtifact& artifact,
                            ArtifactFormat format) {
  artifact.validate();
  const auto& p = artifact.params;
  if (format == ArtifactFormat::kJson) {
    nlohmann::json j;
    j["format"] = "sofa-clusters";
    j["mode"] = to_string(artifact.mode);
    j["n"] = artifact.universe;
    j["params"] = {{"algorithm", p.algorithm},
                   {"theta", p.theta},
                   {"alpha", p.alpha},
                   {"cmax", p.cmax},
                   {"capacity", p.capacity},
                   {"seed", p.seed},
                   {"peak_memory_entries", p.peak_memory_entries}};
    j["right"] = artifact.right_clusters;
    auto left = nlohmann::json::array();
    for (const auto& a : artifact.left) left.push_back({a.id, a.clusters});
    j["left"] = std::move(left);
    return j.dump() + "\n";
  }

  std::ostringstream out;
  out << "#sofa-clusters\tmode=" << to_string(artifact.mode)
      << "\tn=" << artifact.universe << "\tk=" << artifact.k()
      << "\talgorithm=" << p.algorithm << "\ttheta=" << format_double(p.theta)
      << "\talpha=" << format_double(p.alpha) << "\tcmax=" << p.cmax
      << "\tcapacity=" << p.capacity << "\tseed=" << p.seed
      << "\tpeak_memory_entries=" << p.peak_memory_entries << '\n';
  for (std::size_t i = 0; i < artifact.right_clusters.size(); ++i) {
    out << "R\t" << i << '\t' << join_ids(artifact.right_clusters[i], ' ') << '\n';
  }
  for (const auto& a : artifact.left) {
    out << "L\t" << a.id << '\t'
        << (a.clusters.empty() ? std::string("-") : join_ids(a.clusters, ','))
        << '\n';
  }
  return out.str();
}

void write_artifact(const ClusteringArtifact& artifact,
                    const std::filesystem::path& path, ArtifactFormat format) {
  const std::string text = format_artifact(artifact, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StreamError("cannot write " + path.string());
  out << text;
  if (!out) throw StreamError("write failed: " + path.string());
}

namespace {

ClusteringArtifact parse_json_artifact(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("format") != "sofa-clusters") throw StreamError("not a cluster file");
  ClusteringArtifact a;
  a.mode = parse_left_mode(j.at("mode").get<std::string>());
  a.universe = j.at("n").get<std::size_t>();
  const auto& p = j.at("params");
  a.params.algorithm = p.at("algorithm").get<std::string>();
  a.params.theta = p.at("theta").get<double>();
  a.params.alpha = p.at("alpha").get<double>();
  a.params.cmax = p.at("cmax").get<std::size_t>();
  a.params.capacity = p.at("capacity").get<std::size_t>();
  a.params.seed = p.at("seed").get<std::uint64_t>();
  a.params.peak_memory_entries = p.at("peak_memory_entries").get<std::size_t>();
  a.right_clusters = j.at("right").get<std::vector<IndexSet>>();
  for (const auto& entry : j.at("left")) {
    a.left.push_back({entry.at(0).get<LeftId>(),
                      entry.at(1).get<std::vector<std::uint32_t>>()});
  }
  return a;
}

ClusteringArtifact parse_tsv_artifact(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw StreamError("empty cluster file");
  auto fields = split_on(line, '\t');
  if (fields.empty() || fields[0] != "#sofa-clusters") {
    throw StreamError("missing #sofa-clusters header");
  }
  ClusteringArtifact a;
  std::size_t k = 0;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) throw StreamError("malformed header field");
    const auto key = fields[i].substr(0, eq);
    const auto value = fields[i].substr(eq + 1);
    if (key == "mode") a.mode = parse_left_mode(std::string(value));
    else if (key == "n") a.universe = require_number<std::size_t>(value, "n");
    else if (key == "k") k = require_number<std::size_t>(value, "k");
    else if (key == "algorithm") a.params.algorithm = std::string(value);
    else if (key == "theta") a.params.theta = require_double(value, "theta");
    else if (key == "alpha") a.params.alpha = require_double(value, "alpha");
    else if (key == "cmax") a.params.cmax = require_number<std::size_t>(value, "cmax");
    else if (key == "capacity")
      a.params.capacity = require_number<std::size_t>(value, "capacity");
    else if (key == "seed") a.params.seed = require_number<std::uint64_t>(value, "seed");
    else if (key == "peak_memory_entries")
      a.params.peak_memory_entries = require_number<std::size_t>(value, "peak memory");
    else throw StreamError("unknown header field '" + std::string(key) + "'");
  }
  while (std::getline(in, line)) {
    auto cols = split_on(line, '\t');
    if (cols.size() != 3) throw StreamError("malformed cluster line '" + line + "'");
    if (cols[0] == "R") {
      if (require_number<std::size_t>(cols[1], "cluster id") != a.right_clusters.size()) {
        throw StreamError("right clusters out of order");
      }
      IndexSet ids;
      for (auto t : split_ws(cols[2])) ids.push_back(require_number<RightId>(t, "right id"));
      a.right_clusters.push_back(std::move(ids));
    } else if (cols[0] == "L") {
      LeftAssignment la{require_number<LeftId>(cols[1], "left id"), {}};
      if (cols[2] != "-") {
        for (auto t : split_on(cols[2], ',')) {
          la.clusters.push_back(require_number<std::uint32_t>(t, "cluster id"));
        }
      }
      a.left.push_back(std::move(la));
    } else {
      throw StreamError("unknown line tag '" + std::string(cols[0]) + "'");
    }
  }
  if (a.right_clusters.size() != k) throw StreamError("header k disagrees with body");
  return a;
}

}  // namespace

ClusteringArtifact parse_artifact(const std::string& text) {
  ClusteringArtifact a = (!text.empty() && text.front() == '{')
                             ? parse_json_artifact(text)
                             : parse_tsv_artifact(text);
  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw StreamError(std::string("invalid cluster file: ") + e.what());
  }
  return a;
}

ClusteringArtifact read_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StreamError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_artifact(buf.str());
}

void write_ground_truth(const GroundTruthFile& truth,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StreamError("cannot write " + path.string());
  out << "%sofa-truth n=" << truth.universe << " k=" << truth.right_clusters.size()
      << " m=" << truth.left_cluster.size() << '\n';
  for (std::size_t i = 0; i < truth.right_clusters.size(); ++i) {
    out << "V\t" << i << '\t' << join_ids(truth.right_clusters[i], ' ') << '\n';
  }
  for (std::size_t u = 0; u < truth.left_cluster.size(); ++u) {
    out << "U\t" << u << '\t' << truth.left_cluster[u] << '\n';
  }
  if (!out) throw StreamError("write failed: " + path.string());
}

GroundTruthFile read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StreamError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw StreamError("empty ground-truth file");
  auto tokens = split_ws(line);
  if (tokens.empty() || tokens[0] != "%sofa-truth") {
    throw StreamError("missing %sofa-truth header");
  }
  GroundTruthFile t;
  std::size_t k = 0, m = 0;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) throw StreamError("malformed truth header");
    const auto key = tokens[i].substr(0, eq);
    const auto value = require_number<std::size_t>(tokens[i].substr(eq + 1), "header");
    if (key == "n") t.universe = value;
    else if (key == "k") k = value;
    else if (key == "m") m = value;
    else throw StreamError("unknown truth header key");
  }
  while (std::getline(in, line)) {
    auto cols = split_on(line, '\t');
    if (cols.size() != 3) throw StreamError("malformed truth line");
    if (cols[0] == "V") {
      IndexSet ids;
      for (auto tok : split_ws(cols[2])) ids.push_back(require_number<RightId>(tok, "id"));
      t.right_clusters.push_back(std::move(ids));
    } else if (cols[0] == "U") {
      if (require_number<std::size_t>(cols[1], "left id") != t.left_cluster.size()) {
        throw StreamError("truth left ids must be consecutive from 0");
      }
      const auto c = require_number<std::uint32_t>(cols[2], "cluster");
      if (c >= k) throw StreamError("truth cluster id out of range");
      t.left_cluster.push_back(c);
    } else {
      throw StreamError("unknown truth line tag");
    }
  }
  if (t.right_clusters.size() != k || t.left_cluster.size() != m) {
    throw StreamError("truth header disagrees with body");
  }
  return t;
}

}  // namespace sofa
