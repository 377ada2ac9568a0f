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

// sofa: generate planted instances, cluster streams, evaluate results.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sofa/metrics.hpp"
#include "sofa/pipeline.hpp"
#include "sofa/stream_io.hpp"
#include "sofa/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GenFlags {
  std::optional<std::size_t> n;
  std::size_t k = 50;
  std::size_t ell = 200;
  std::size_t r = 30;
  double p = 0.7;
  std::optional<double> q;
  std::optional<double> noise_degree;
  std::uint64_t seed = 0;
  bool disjoint_right = false;
  bool sorted = false;
};

sofa::PlantedParams planted_params(const GenFlags& f) {
  sofa::PlantedParams params;
  params.n = *f.n;
  params.k = f.k;
  params.ell = f.ell;
  params.r = f.r;
  params.p = f.p;
  params.q = f.q;
  params.noise_degree = f.noise_degree;
  if (!f.q && !f.noise_degree) params.noise_degree = 20.0;
  params.seed = f.seed;
  params.disjoint_right = f.disjoint_right;
  params.shuffle = !f.sorted;
  params.validate();
  return params;
}

void add_gen_flags(CLI::App* cmd, GenFlags& f, bool require_n) {
  auto* n = cmd->add_option("--n", f.n, "right vertices");
  if (require_n) n->required();
  cmd->add_option("--k", f.k, "planted clusters")->capture_default_str();
  cmd->add_option("--ell", f.ell, "left vertices per cluster")->capture_default_str();
  cmd->add_option("--r", f.r, "right vertices per cluster")->capture_default_str();
  cmd->add_option("--p", f.p, "in-cluster edge probability")->capture_default_str();
  auto* q = cmd->add_option("--q", f.q, "noise edge probability");
  auto* noise = cmd->add_option("--noise-degree", f.noise_degree,
                                "expected noise neighbors per left vertex (default 20)");
  q->excludes(noise);
  cmd->add_option("--seed", f.seed, "random seed")->capture_default_str();
  cmd->add_flag("--disjoint-right", f.disjoint_right, "sample disjoint right clusters");
  cmd->add_flag("--sorted", f.sorted, "stream left vertices cluster by cluster");
}

std::vector<double> parse_thetas(const std::string& text, bool& is_auto) {
  is_auto = text == "auto";
  std::vector<double> out;
  if (is_auto || text.empty()) return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad theta '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Phase telemetry lines written by `run --telemetry`.
ordered_json summarize_telemetry(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::size_t phases = 0;
  std::size_t restarts = 0;
  ordered_json last;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    last = ordered_json::parse(line);
    ++phases;
    if (last.value("restarted", false)) ++restarts;
  }
  ordered_json out;
  out["phases"] = phases;
  out["restarts"] = restarts;
  if (phases > 0) {
    out["final_lower_bound"] = last["lower_bound"];
    out["final_centers"] = last["centers"];
  }
  return out;
}

struct Evaluation {
  std::optional<double> right_quality;
  std::optional<double> left_quality;
  sofa::ReconstructionStats stats;
};

Evaluation evaluate(sofa::StreamSource& stream, const sofa::ClusteringArtifact& artifact,
                    const sofa::GroundTruthFile* truth) {
  Evaluation e;
  e.stats = sofa::reconstruction_stats(stream, artifact.left, artifact.right_clusters);
  if (truth) {
    e.right_quality = sofa::quality(truth->right_clusters, artifact.right_clusters);
    std::vector<sofa::IndexSet> truth_left(truth->right_clusters.size());
    for (std::size_t u = 0; u < truth->left_cluster.size(); ++u) {
      truth_left.at(truth->left_cluster[u]).push_back(static_cast<sofa::RightId>(u));
    }
    std::vector<sofa::IndexSet> found_left(artifact.k());
    for (const auto& a : artifact.left) {
      for (std::uint32_t c : a.clusters) {
        found_left[c].push_back(static_cast<sofa::RightId>(a.id));
      }
    }
    for (auto& s : found_left) std::sort(s.begin(), s.end());
    e.left_quality = sofa::quality(truth_left, found_left);
  }
  return e;
}

int cmd_gen(const GenFlags& flags, const fs::path& out_dir) {
  const sofa::PlantedParams params = planted_params(flags);
  fs::create_directories(out_dir);
  sofa::PlantedStream stream(params);
  sofa::write_adjacency(out_dir / "graph.adj", stream);
  sofa::write_ground_truth(stream.truth().to_file(), out_dir / "truth.tsv");
  std::cout << "wrote " << (out_dir / "graph.adj").string() << " and "
            << (out_dir / "truth.tsv").string() << '\n';
  return 0;
}

struct RunFlags {
  fs::path input;
  std::string format = "adjacency";
  std::optional<std::size_t> universe;
  std::string algo = "sofa";
  std::size_t k = 0;
  std::size_t cmax = 0;
  std::optional<std::size_t> capacity;
  std::optional<std::size_t> s;
  bool estimate_s = false;
  std::optional<double> alpha;
  std::string theta;
  std::string mode = "bicluster";
  bool skip_grouping = false;
  std::uint64_t seed = 0;
  bool theory_mode = false;
  std::optional<double> p;
  double k4 = sofa::kDefaultK4;
  std::optional<double> threshold;
  std::size_t sample_left = 0;
  std::size_t sample_right = 0;
  std::size_t max_edges = 0;
  std::size_t max_swap_candidates = 0;
  fs::path telemetry;
  fs::path out;
  std::string artifact_format = "tsv";
};

std::string theta_label(double theta) { return "theta" + sofa::format_double(theta); }

int cmd_run(const RunFlags& f) {
  sofa::RunOptions o;
  o.algorithm = sofa::parse_algorithm(f.algo);
  o.k = f.k;
  o.cmax = f.cmax;
  o.capacity = f.capacity;
  o.s = f.estimate_s ? std::nullopt : f.s;
  o.alpha = f.alpha;
  o.thetas = parse_thetas(f.theta, o.auto_theta);
  o.mode = sofa::parse_left_mode(f.mode);
  o.skip_grouping = f.skip_grouping;
  o.seed = f.seed;
  o.theory_mode = f.theory_mode;
  o.p = f.p;
  o.k4 = f.k4;
  o.distance_threshold = f.threshold;
  o.sample_left = f.sample_left;
  o.sample_right = f.sample_right;
  o.static_options.max_edges = f.max_edges;
  o.static_options.kmedians.max_candidates_per_sweep = f.max_swap_candidates;
  o.kmedians.max_candidates_per_sweep = f.max_swap_candidates;

  std::ofstream telemetry;
  if (!f.telemetry.empty()) {
    telemetry.open(f.telemetry, std::ios::binary);
    if (!telemetry) throw std::runtime_error("cannot write " + f.telemetry.string());
    o.observer = [&](const sofa::PhaseRecord& r) {
      telemetry << sofa::format_phase_record(r) << '\n';
    };
  }

  sofa::FileStream stream(f.input, sofa::parse_input_format(f.format), f.universe);
  const sofa::ArtifactFormat format = sofa::parse_artifact_format(f.artifact_format);
  const sofa::RunReport report = sofa::run_pipeline(stream, o);

  fs::create_directories(f.out);
  const std::string ext = format == sofa::ArtifactFormat::kJson ? ".json" : ".tsv";
  ordered_json summary;
  summary["algorithm"] = f.algo;
  summary["mode"] = f.mode;
  if (report.s) summary["s"] = *report.s;
  summary["capacity"] = report.capacity;
  summary["centers"] = report.centers;
  summary["phases"] = report.phases.size();
  summary["peak_memory_entries"] = report.peak_memory_entries;
  if (report.theta_estimate) {
    summary["theta_estimate"] = {{"theta", report.theta_estimate->theta},
                                 {"p_hat", report.theta_estimate->p_hat},
                                 {"q_hat", report.theta_estimate->q_hat},
                                 {"fallback", report.theta_estimate->fallback}};
    if (report.theta_estimate->fallback) {
      std::cerr << "warning: too few sketch counters to fit theta; using 0.5\n";
    }
  }
  summary["artifacts"] = ordered_json::array();
  for (const auto& artifact : report.artifacts) {
    const fs::path path = f.out / ("clusters-" + theta_label(artifact.params.theta) + ext);
    sofa::write_artifact(artifact, path, format);
    summary["artifacts"].push_back(path.filename().string());
  }
  write_text(f.out / "run.json", summary.dump() + "\n");
  std::cout << summary.dump() << '\n';
  return 0;
}

struct EvalFlags {
  fs::path input;
  std::string format = "adjacency";
  std::optional<std::size_t> universe;
  fs::path clusters;
  fs::path truth;
  fs::path telemetry;
  fs::path out;
};

int cmd_eval(const EvalFlags& f) {
  const sofa::ClusteringArtifact artifact = sofa::read_artifact(f.clusters);
  std::optional<sofa::GroundTruthFile> truth;
  if (!f.truth.empty()) truth = sofa::read_ground_truth(f.truth);
  sofa::FileStream stream(f.input, sofa::parse_input_format(f.format), f.universe);
  if (stream.universe() != artifact.universe) {
    throw std::invalid_argument("clusters and input disagree on the right universe");
  }
  const Evaluation e = evaluate(stream, artifact, truth ? &*truth : nullptr);

  ordered_json j;
  j["algorithm"] = artifact.params.algorithm;
  j["mode"] = sofa::to_string(artifact.mode);
  j["theta"] = artifact.params.theta;
  j["k"] = artifact.k();
  if (e.right_quality) j["right_quality"] = *e.right_quality;
  if (e.left_quality) j["left_quality"] = *e.left_quality;
  j["gain"] = e.stats.gain;
  j["recall"] = e.stats.recall;
  j["edges"] = e.stats.edges;
  j["mismatches"] = e.stats.mismatches;
  j["covered"] = e.stats.covered;
  j["peak_memory_entries"] = artifact.params.peak_memory_entries;
  if (!f.telemetry.empty()) j["telemetry"] = summarize_telemetry(f.telemetry);

  std::string header;
  std::string row;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) continue;
    header += (header.empty() ? "" : "\t") + key;
    const std::string cell = value.is_string() ? value.get<std::string>()
                             : value.is_number_float()
                                 ? sofa::format_double(value.get<double>())
                                 : value.dump();
    row += (row.empty() ? "" : "\t") + cell;
  }
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    write_text(f.out / "metrics.jsonl", j.dump() + "\n");
    write_text(f.out / "metrics.tsv", header + "\n" + row + "\n");
  }
  std::cout << j.dump() << '\n';
  return 0;
}

struct BenchFlags {
  GenFlags gen;
  std::string algos = "sofa,static";
  std::string theta;
  std::size_t seeds = 1;
  std::size_t cmax = 0;
  std::optional<std::size_t> capacity;
  std::optional<double> alpha;
  std::string mode = "bicluster";
  std::size_t sample_left = 0;
  std::size_t max_swap_candidates = 0;
  fs::path out;
};

int cmd_bench(const BenchFlags& f) {
  GenFlags gen = f.gen;
  if (!gen.n) gen.n = 8000;
  std::vector<std::string> algos;
  {
    std::stringstream in(f.algos);
    std::string a;
    while (std::getline(in, a, ',')) algos.push_back(a);
  }
  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + f.out.string());
  }
  const std::string header =
      "seed\talgorithm\ttheta\tright_quality\tleft_quality\tgain\trecall\tedges\t"
      "peak_memory_entries\tseconds";
  std::cout << header << '\n';
  if (file) file << header << '\n';

  for (std::size_t s = 0; s < f.seeds; ++s) {
    gen.seed = f.gen.seed + s;
    const sofa::PlantedParams params = planted_params(gen);
    const sofa::PlantedInstance instance = sofa::generate_planted(params);
    const auto records = instance.stream.records();
    const sofa::GroundTruthFile truth = instance.truth.to_file();
    for (const auto& algo : algos) {
      sofa::RunOptions o;
      o.algorithm = sofa::parse_algorithm(algo);
      o.k = params.k;
      o.cmax = f.cmax;
      o.capacity = f.capacity;
      o.alpha = f.alpha;
      o.thetas = parse_thetas(f.theta, o.auto_theta);
      o.mode = sofa::parse_left_mode(f.mode);
      if (o.algorithm == sofa::Algorithm::kGreedy) {
        // The planted p is known here, so greedy runs with its theory parameters.
        o.theory_mode = true;
        o.p = params.p;
      }
      o.seed = gen.seed;
      o.sample_left = f.sample_left == 0 ? params.left_count() / 4 : f.sample_left;
      o.kmedians.max_candidates_per_sweep = f.max_swap_candidates;
      o.static_options.kmedians.max_candidates_per_sweep = f.max_swap_candidates;
      sofa::MemoryStream stream(params.n, {records.begin(), records.end()});
      const auto start = std::chrono::steady_clock::now();
      const sofa::RunReport report = sofa::run_pipeline(stream, o);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      for (const auto& artifact : report.artifacts) {
        sofa::MemoryStream replay(params.n, {records.begin(), records.end()});
        const Evaluation e = evaluate(replay, artifact, &truth);
        std::ostringstream line;
        line << gen.seed << '\t' << algo << '\t' << sofa::format_double(artifact.params.theta)
             << '\t' << sofa::format_double(*e.right_quality) << '\t'
             << sofa::format_double(*e.left_quality) << '\t'
             << sofa::format_double(e.stats.gain) << '\t'
             << sofa::format_double(e.stats.recall) << '\t' << e.stats.edges << '\t'
             << artifact.params.peak_memory_entries << '\t' << seconds;
        std::cout << line.str() << '\n';
        if (file) file << line.str() << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming biclustering and Boolean matrix factorization"};
  app.require_subcommand(1);

  GenFlags gen_flags;
  fs::path gen_out;
  auto* gen = app.add_subcommand("gen", "generate a planted instance");
  add_gen_flags(gen, gen_flags, true);
  gen->add_option("--out", gen_out, "output directory")->required();

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "cluster a stream");
  run->add_option("--input", run_flags.input, "input graph")->required()->check(CLI::ExistingFile);
  run->add_option("--format", run_flags.format, "adjacency or edge-list")->capture_default_str();
  run->add_option("--universe", run_flags.universe, "right vertices when the input has no header");
  run->add_option("--algo", run_flags.algo, "sofa, sofa-auto, greedy, static or rs-static")
      ->capture_default_str();
  run->add_option("--k", run_flags.k, "clusters");
  run->add_option("--cmax", run_flags.cmax, "center budget (default 20k)");
  run->add_option("--capacity", run_flags.capacity, "sketch capacity (default max(3s, 0.05n))");
  auto* s_opt = run->add_option("--s", run_flags.s, "degree scale");
  run->add_flag("--estimate-s", run_flags.estimate_s,
                "99th percentile degree of the first 10000 records")
      ->excludes(s_opt);
  run->add_option("--alpha", run_flags.alpha, "asymmetric distance weight (default 0.1 for sofa)");
  run->add_option("--theta", run_flags.theta, "comma-separated thresholds or auto");
  run->add_option("--mode", run_flags.mode, "bicluster or bmf")->capture_default_str();
  run->add_flag("--skip-grouping", run_flags.skip_grouping, "per-center clusters (bmf)");
  run->add_option("--seed", run_flags.seed, "random seed")->capture_default_str();
  run->add_flag("--theory-mode", run_flags.theory_mode, "greedy with provable parameters");
  run->add_option("--p", run_flags.p, "in-cluster edge probability for theory mode");
  run->add_option("--k4", run_flags.k4, "theory-mode distance constant")->capture_default_str();
  run->add_option("--threshold", run_flags.threshold, "greedy distance threshold");
  run->add_option("--sample-left", run_flags.sample_left, "rs-static reservoir size");
  run->add_option("--sample-right", run_flags.sample_right, "rs-static right ids kept");
  run->add_option("--max-edges", run_flags.max_edges, "static memory budget in edges");
  run->add_option("--max-swap-candidates", run_flags.max_swap_candidates,
                  "k-medians swap candidates per sweep (0 = all)");
  run->add_option("--telemetry", run_flags.telemetry, "phase telemetry output");
  run->add_option("--artifact-format", run_flags.artifact_format, "tsv or json")
      ->capture_default_str();
  run->add_option("--out", run_flags.out, "output directory")->required();

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "score a clustering");
  eval->add_option("--input", eval_flags.input, "input graph")->required()->check(CLI::ExistingFile);
  eval->add_option("--format", eval_flags.format, "adjacency or edge-list")->capture_default_str();
  eval->add_option("--universe", eval_flags.universe, "right vertices when the input has no header");
  eval->add_option("--clusters", eval_flags.clusters, "clustering artifact")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--ground-truth", eval_flags.truth, "planted ground truth")
      ->check(CLI::ExistingFile);
  eval->add_option("--telemetry", eval_flags.telemetry, "phase telemetry from run")
      ->check(CLI::ExistingFile);
  eval->add_option("--out", eval_flags.out, "output directory");

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "generate, cluster and score in memory");
  add_gen_flags(bench, bench_flags.gen, false);
  bench->add_option("--algos", bench_flags.algos, "comma-separated algorithms")
      ->capture_default_str();
  bench->add_option("--theta", bench_flags.theta, "comma-separated thresholds or auto");
  bench->add_option("--seeds", bench_flags.seeds, "instances")->capture_default_str();
  bench->add_option("--cmax", bench_flags.cmax, "center budget (default 20k)");
  bench->add_option("--capacity", bench_flags.capacity, "sketch capacity");
  bench->add_option("--alpha", bench_flags.alpha, "asymmetric distance weight");
  bench->add_option("--mode", bench_flags.mode, "bicluster or bmf")->capture_default_str();
  bench->add_option("--sample-left", bench_flags.sample_left, "rs-static reservoir size");
  bench->add_option("--max-swap-candidates", bench_flags.max_swap_candidates,
                    "k-medians swap candidates per sweep (0 = all)");
  bench->add_option("--out", bench_flags.out, "TSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gen_flags, gen_out);
    if (*run) return cmd_run(run_flags);
    if (*eval) return cmd_eval(eval_flags);
    if (*bench) return cmd_bench(bench_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
