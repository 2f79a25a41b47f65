// adaptgear: benchmark harness for subgraph-level adaptive aggregation.
//
//   adaptgear crossover --rmat 2048,4194304 --feat-dim 32
//   adaptgear ablate --planted 256,16,0.5,0.0005 --iters 100
//   adaptgear density --graph citeseer.txt --comm-size 16
//   adaptgear run --planted 32,16,0.5,0.005 --mode O3 --model gcn

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"

#include "adaptgear/decompose.hpp"
#include "adaptgear/error.hpp"
#include "adaptgear/experiments.hpp"

namespace {

using namespace adaptgear;
using ordered_json = nlohmann::ordered_json;

struct Options {
  std::string graph_path;
  bool weighted = false;
  std::string rmat;
  std::string planted;
  std::size_t comm_size = 16;
  std::string reorder = "bfs";
  std::string mode = "O3";
  std::string op = "sum";
  std::string model = "agg-only";
  std::size_t feat_dim = 32;
  std::size_t iters = 50;
  std::size_t profile_iters = 3;
  std::uint64_t seed = 42;
  int threads = 0;
  std::size_t tile_budget = kDefaultTileBudgetBytes;
  std::size_t reps = 5;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Options& o) {
  auto* graph = cmd->add_option("--graph", o.graph_path, "Edge-list file (src<TAB>dst[<TAB>w])");
  auto* rmat = cmd->add_option("--rmat", o.rmat, "RMAT graph V,E");
  auto* planted = cmd->add_option("--planted", o.planted, "Planted partition groups,size,p_in,p_out");
  graph->excludes(rmat)->excludes(planted);
  rmat->excludes(planted);
  cmd->add_flag("--weighted", o.weighted, "Read a weight column from --graph");
  cmd->add_option("--comm-size", o.comm_size, "Community / block size B")->check(CLI::PositiveNumber);
  cmd->add_option("--reorder", o.reorder, "bfs | none | file:PATH");
  cmd->add_option("--mode", o.mode, "O1 | O2 | O3")->check(CLI::IsMember({"O1", "O2", "O3"}));
  cmd->add_option("--op", o.op, "sum | mean | max")->check(CLI::IsMember({"sum", "mean", "max"}));
  cmd->add_option("--model", o.model, "gcn | gin | agg-only")
      ->check(CLI::IsMember({"gcn", "gin", "agg-only", "agg_only"}));
  cmd->add_option("--feat-dim", o.feat_dim, "Feature dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", o.iters, "Iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--profile-iters", o.profile_iters, "Profiling runs per candidate")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tile-budget", o.tile_budget, "Scratch bytes per staged feature tile");
  cmd->add_option("--out", o.out, "Report path (default stdout)");
  cmd->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

GraphSource source_of(const Options& o) {
  if (!o.graph_path.empty()) return GraphSource::file(o.graph_path, o.weighted);
  if (!o.rmat.empty()) return GraphSource::parse_rmat(o.rmat);
  return GraphSource::parse_planted(o.planted.empty() ? "32,16,0.5,0.005" : o.planted);
}

RunConfig config_of(const Options& o) {
  RunConfig c;
  c.source = source_of(o);
  c.comm_size = o.comm_size;
  c.reorder = ReorderMethod::parse(o.reorder);
  c.mode = parse_mode(o.mode);
  c.op = parse_aggregate_op(o.op);
  c.model = parse_model(o.model);
  c.feat_dim = o.feat_dim;
  c.iters = o.iters;
  c.profile_iters = o.profile_iters;
  c.seed = o.seed;
  c.threads = o.threads;
  c.kernel.tile_budget_bytes = o.tile_budget;
  return c;
}

template <typename WriteFn>
void write_output(const Options& o, WriteFn&& write) {
  if (o.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw Error("cannot open output file " + o.out);
  write(file);
}

void emit_json(const Options& o, const ordered_json& j) {
  write_output(o, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

void emit_table(const Options& o, const ReportTable& t) {
  write_output(o, [&](std::ostream& out) { emit_report(t, parse_report_format(o.format), out); });
}

void cmd_density(const Options& o) {
  const RunConfig c = config_of(o);
  const Graph g = load_graph(c.source, c.seed);
  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();
  const Partition p = make_partition(g, c.reorder, c.comm_size, c.seed);
  const Graph reordered = apply_reorder(g, p);
  const double reorder_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  t0 = Clock::now();
  const DecomposedGraph d = decompose(reordered, c.comm_size);
  const double decompose_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  const DensityReport r = density_report(d);
  const TopologyBytes bytes = topology_memory_bytes(d);
  const double overhead = topology_overhead_fraction(bytes, d.num_vertices, c.feat_dim);

  if (o.format == "csv") {
    ReportTable t;
    t.columns = {"source", "vertices", "edges", "comm_size", "full", "intra", "inter", "num_communities",
                 "intra_edge_fraction", "reorder_ms", "decompose_ms", "full_bytes", "intra_bytes",
                 "inter_bytes", "overhead_fraction"};
    t.add_row({c.source.describe(), static_cast<std::int64_t>(g.num_vertices()),
               static_cast<std::int64_t>(g.num_edges()), static_cast<std::int64_t>(c.comm_size),
               r.full_density, r.intra_density, r.inter_density, static_cast<std::int64_t>(r.num_communities),
               r.intra_edge_fraction, reorder_ms, decompose_ms, static_cast<std::int64_t>(bytes.full),
               static_cast<std::int64_t>(bytes.intra), static_cast<std::int64_t>(bytes.inter), overhead});
    emit_table(o, t);
    return;
  }
  emit_json(o, {{"config", {{"source", c.source.describe()},
                            {"num_vertices", g.num_vertices()},
                            {"num_edges", g.num_edges()},
                            {"comm_size", c.comm_size},
                            {"reorder", c.reorder.str()},
                            {"feat_dim", c.feat_dim}}},
                {"density", {{"full", r.full_density},
                             {"intra", r.intra_density},
                             {"inter", r.inter_density},
                             {"num_communities", r.num_communities},
                             {"intra_edge_fraction", r.intra_edge_fraction}}},
                {"preprocessing_ms", {{"reorder", reorder_ms}, {"decompose", decompose_ms}}},
                {"topology_bytes", {{"full", bytes.full},
                                    {"intra", bytes.intra},
                                    {"inter", bytes.inter},
                                    {"overhead_fraction", overhead}}}});
}

void cmd_run(const Options& o) {
  const RunConfig c = config_of(o);
  const RunReport r = run_experiment(c, load_graph(c.source, c.seed));
  if (o.format == "csv") return emit_table(o, iterations_table(r));
  emit_json(o, to_json(r));
}

void cmd_ablate(const Options& o) {
  const RunConfig c = config_of(o);
  const AblationResult r = run_ablation(c, load_graph(c.source, c.seed));
  if (o.format == "csv") {
    emit_table(o, ablation_table(r));
  } else {
    emit_json(o, to_json(r));
  }
  if (!r.equivalent) throw Error("modes disagree: max relative difference " + std::to_string(r.max_rel_diff));
}

void cmd_crossover(const Options& o) {
  CrossoverConfig c;
  c.feat_dim = o.feat_dim;
  c.reps = o.reps;
  c.seed = o.seed;
  if (!o.rmat.empty()) {
    const GraphSource s = GraphSource::parse_rmat(o.rmat);
    c.num_vertices = s.rmat_vertices;
    const std::size_t max_edges = s.rmat_edges;
    for (std::size_t e : c.ladder()) {
      if (e < max_edges) c.edge_counts.push_back(e);
    }
    c.edge_counts.push_back(max_edges);
  }
  if (c.num_vertices > c.oracle_cap) {
    std::cerr << "note: " << c.num_vertices << " vertices exceed the dense reference cap; oracle check skipped\n";
  }
  const auto points = run_crossover_sweep(c);
  const ReportTable t = crossover_table(points);
  if (o.format == "csv") return emit_table(o, t);
  ordered_json rows = ordered_json::array();
  for (const auto& p : points) {
    ordered_json timings = ordered_json::object();
    for (const auto& k : p.timings) {
      timings[std::string(to_string(k.kernel))] = {{"median_us", k.median_us}, {"max_rel_error", k.max_rel_error}};
    }
    rows.push_back({{"edges", p.edges},
                    {"density", p.density},
                    {"best", to_string(p.best)},
                    {"oracle_checked", p.oracle_checked},
                    {"kernels", timings}});
  }
  emit_json(o, {{"config", {{"num_vertices", c.num_vertices},
                            {"feat_dim", c.feat_dim},
                            {"reps", c.reps},
                            {"seed", c.seed},
                            {"rmat_probs", {c.rmat.a, c.rmat.b, c.rmat.c, c.rmat.d}}}},
                {"points", rows}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgraph-level adaptive GNN aggregation benchmarks"};
  app.require_subcommand(1);
  Options o;
  auto* crossover = app.add_subcommand("crossover", "Format crossover sweep over RMAT densities");
  auto* ablate = app.add_subcommand("ablate", "Compare O1 / O2 / O3 execution modes");
  auto* density = app.add_subcommand("density", "Full / intra / inter density and overhead report");
  auto* run = app.add_subcommand("run", "Run one configuration and trace every iteration");
  for (auto* cmd : {crossover, ablate, density, run}) add_common(cmd, o);
  crossover->add_option("--reps", o.reps, "Timed repetitions per kernel")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (o.threads > 0) omp_set_num_threads(o.threads);
    if (*crossover) cmd_crossover(o);
    if (*ablate) cmd_ablate(o);
    if (*density) cmd_density(o);
    if (*run) cmd_run(o);
  } catch (const std::exception& e) {
    std::cerr << "adaptgear: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
