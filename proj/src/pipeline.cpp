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

#include "sofa/pipeline.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

#include "sofa/second_pass.hpp"

namespace sofa {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSofa: return "sofa";
    case Algorithm::kSofaAuto: return "sofa-auto";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kStatic: return "static";
    case Algorithm::kRsStatic: return "rs-static";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kSofa, Algorithm::kSofaAuto, Algorithm::kGreedy,
                      Algorithm::kStatic, Algorithm::kRsStatic}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

namespace {

bool is_sofa(Algorithm a) { return a == Algorithm::kSofa || a == Algorithm::kSofaAuto; }

// Every center as its own group, for thresholding without grouping.
std::vector<CenterGroup> singleton_groups(const std::vector<WeightedCenter>& centers) {
  std::vector<CenterGroup> groups;
  groups.reserve(centers.size());
  for (const auto& c : centers) groups.push_back({c.sketch, c.weight, {groups.size()}});
  return groups;
}

void check(const RunOptions& o) {
  const bool needs_k = o.algorithm != Algorithm::kGreedy;
  if (needs_k && o.k == 0) throw std::invalid_argument("k must be at least 1");
  if (o.skip_grouping && o.mode != LeftMode::kBmf) {
    throw std::invalid_argument("skip-grouping applies to BMF mode only");
  }
  if (o.skip_grouping && !is_sofa(o.algorithm)) {
    throw std::invalid_argument("skip-grouping applies to the sofa algorithms only");
  }
  if (o.auto_theta && !o.thetas.empty()) {
    throw std::invalid_argument("give either theta values or auto, not both");
  }
  for (double t : o.thetas) {
    if (!(t > 0.0)) throw std::invalid_argument("theta values must be positive");
  }
  if (o.algorithm == Algorithm::kGreedy && !o.theory_mode && !o.distance_threshold) {
    throw std::invalid_argument("greedy needs a distance threshold or theory mode");
  }
  if (o.theory_mode && o.algorithm != Algorithm::kGreedy) {
    throw std::invalid_argument("theory mode applies to greedy only");
  }
  if (o.theory_mode && !o.p) throw std::invalid_argument("theory mode needs p");
  if (o.algorithm == Algorithm::kRsStatic) {
    if (o.sample_left == 0) throw std::invalid_argument("rs-static needs a sample size");
    if (o.thetas.size() > 1) {
      throw std::invalid_argument("rs-static evaluates a single theta");
    }
  }
}

std::vector<std::vector<IndexSet>> threshold_all(std::span<const CenterGroup> groups,
                                                 std::span<const double> thetas) {
  std::vector<std::vector<IndexSet>> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.push_back(threshold_groups(groups, t));
  return out;
}

}  // namespace

RunReport run_pipeline(StreamSource& stream, const RunOptions& options) {
  check(options);
  RunReport report;
  const Algorithm algo = options.algorithm;
  const bool auto_theta = options.auto_theta || algo == Algorithm::kSofaAuto;
  std::vector<double> thetas = options.thetas;
  if (thetas.empty() && !auto_theta) thetas = kDefaultThetaGrid;
  if (algo == Algorithm::kRsStatic && thetas.size() > 1) thetas.resize(1);

  const DistanceMetric metric(options.alpha.value_or(is_sofa(algo) ? kDefaultAlpha : 1.0));
  const bool sketched = is_sofa(algo) || algo == Algorithm::kGreedy;
  const bool needs_s = (sketched && !options.capacity) || options.theory_mode;

  StreamSource* source = &stream;
  std::unique_ptr<PrefixBufferedStream> buffered;
  report.s = options.s;
  if (needs_s && !report.s) {
    buffered = std::make_unique<PrefixBufferedStream>(stream, kDegreePrefix);
    report.s = degree_percentile(buffered->prefix_records(), 0.99);
    source = buffered.get();
  }
  if (sketched) {
    report.capacity = options.capacity.value_or(
        default_sketch_capacity(report.s.value_or(0), stream.universe()));
  }

  std::vector<std::vector<IndexSet>> candidates;
  std::size_t keep = 0;
  std::size_t cmax = 0;
  std::vector<CenterGroup> groups;

  switch (algo) {
    case Algorithm::kSofa:
    case Algorithm::kSofaAuto: {
      SofaConfig config;
      config.k = options.k;
      config.cmax = options.cmax;
      config.sketch_capacity = report.capacity;
      config.metric = metric;
      config.seed = options.seed;
      config.kmedians = options.kmedians;
      cmax = config.center_budget();
      SofaResult result = sofa_pass(*source, config, options.observer);
      report.phases = std::move(result.phases);
      report.centers = result.centers.size();
      report.peak_memory_entries = result.peak_memory_entries;
      if (options.skip_grouping) {
        groups = singleton_groups(result.centers);
        keep = options.k;
      } else {
        groups = group_centers(result.centers, config).groups;
      }
      break;
    }
    case Algorithm::kGreedy: {
      GreedyConfig config;
      config.sketch_capacity = report.capacity;
      config.metric = metric;
      if (options.theory_mode) {
        const TheoryParameters theory = theory_parameters(*options.p, *report.s, options.k4);
        config.distance_threshold = theory.distance_threshold;
        if (options.thetas.empty() && !auto_theta) thetas = {theory.theta};
      } else {
        config.distance_threshold = *options.distance_threshold;
      }
      const std::vector<WeightedCenter> centers = greedy_pass(*source, config);
      report.centers = centers.size();
      for (const auto& c : centers) report.peak_memory_entries += c.logical_entries();
      groups = singleton_groups(centers);
      if (options.mode == LeftMode::kBmf) keep = options.k;
      break;
    }
    case Algorithm::kStatic: {
      std::vector<Record> rows;
      Record record;
      source->begin_pass();
      while (source->next(record)) {
        report.peak_memory_entries += record.row.size();
        if (options.static_options.max_edges > 0 &&
            report.peak_memory_entries > options.static_options.max_edges) {
          throw BudgetExceeded("static clustering exceeds its edge budget of " +
                               std::to_string(options.static_options.max_edges));
        }
        rows.push_back(std::move(record));
      }
      report.centers = rows.size();
      groups = static_grouping(rows, stream.universe(), options.k, metric, options.seed,
                               options.static_options)
                   .groups;
      break;
    }
    case Algorithm::kRsStatic: {
      ReductionConfig config;
      config.sample_left = options.sample_left;
      config.sample_right =
          options.sample_right == 0 ? stream.universe() : options.sample_right;
      config.seed = options.seed;
      std::optional<ThetaEstimate> estimate;
      auto algorithm = [&](std::span<const Record> rows, std::size_t universe) {
        const Grouping g = static_grouping(rows, universe, options.k, metric, options.seed,
                                           options.static_options);
        if (auto_theta) {
          estimate = estimate_theta(g.groups);
          thetas = {estimate->theta};
        }
        return threshold_groups(g.groups, thetas.front());
      };
      ReductionResult result = rs_reduction(*source, config, algorithm);
      report.theta_estimate = estimate;
      report.centers = result.sample_rows;
      report.peak_memory_entries = result.sample_edges;
      candidates.push_back(std::move(result.clusters));
      break;
    }
  }

  if (algo != Algorithm::kRsStatic) {
    if (auto_theta) {
      report.theta_estimate = estimate_theta(groups);
      thetas = {report.theta_estimate->theta};
    }
    candidates = threshold_all(groups, thetas);
  }
  groups.clear();

  std::vector<LeftRecovery> recovered = recover_left(*source, candidates, options.mode, keep);
  for (std::size_t t = 0; t < recovered.size(); ++t) {
    ClusteringArtifact artifact;
    artifact.mode = options.mode;
    artifact.universe = stream.universe();
    artifact.right_clusters = std::move(recovered[t].clusters);
    artifact.left = std::move(recovered[t].membership);
    artifact.params.algorithm = to_string(algo);
    artifact.params.theta = thetas[t];
    artifact.params.alpha = metric.alpha();
    artifact.params.cmax = cmax;
    artifact.params.capacity = report.capacity;
    artifact.params.seed = options.seed;
    artifact.params.peak_memory_entries = report.peak_memory_entries;
    report.artifacts.push_back(std::move(artifact));
  }
  return report;
}

}  // namespace sofa
