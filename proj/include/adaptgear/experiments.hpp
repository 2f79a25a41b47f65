#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "adaptgear/generators.hpp"
#include "adaptgear/pipeline.hpp"
#include "adaptgear/report.hpp"

namespace adaptgear {

/// Where the input graph comes from: an edge-list file, RMAT ("V,E") or a
/// planted-partition generator ("groups,group_size,p_in,p_out").
struct GraphSource {
  enum class Kind { kFile, kRmat, kPlanted } kind = Kind::kPlanted;
  std::filesystem::path path;
  bool weighted = false;
  std::size_t rmat_vertices = 0;
  std::size_t rmat_edges = 0;
  RmatParams rmat;
  PlantedPartitionParams planted;

  static GraphSource file(std::filesystem::path path, bool weighted = false);
  static GraphSource parse_rmat(std::string_view spec);
  static GraphSource parse_planted(std::string_view spec);
  std::string describe() const;
};

/// Materializes the source; `seed` drives the generators (planted keeps its
/// own seed unless it is zero).
Graph load_graph(const GraphSource& source, std::uint64_t seed);

struct RunConfig {
  GraphSource source;
  std::size_t comm_size = 16;
  ReorderMethod reorder;
  Mode mode = Mode::kO3;
  AggregateOp op = AggregateOp::kSum;
  Model model = Model::kAggOnly;
  std::size_t feat_dim = 32;
  std::size_t iters = 50;
  std::size_t profile_iters = 3;
  std::uint64_t seed = 42;
  int threads = 0;  // 0: runtime default
  KernelOptions kernel;

  /// GCN and GIN always aggregate with sum.
  AggregateOp effective_op() const;
  PipelineOptions pipeline_options() const;
};

struct RunTotals {
  std::size_t iterations = 0;
  std::size_t warmup_iterations = 0;
  double total_us = 0;
  double steady_median_us = 0;
  double update_total_us = 0;
};

struct RunReport {
  RunConfig config;
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;
  DensityReport density;
  PreprocessingTimes preprocessing;
  TopologyBytes topology;
  double overhead_fraction = 0;
  std::vector<IterationRecord> iterations;
  std::optional<KernelKind> locked_intra;
  std::optional<KernelKind> locked_inter;
  RunTotals totals;
  /// Final layer output in original vertex order (not serialized).
  FeatureMatrix output;
};

/// Steps one configuration an iteration at a time, so several runs can be
/// interleaved and share the same timing drift.
class ExperimentRunner {
 public:
  ExperimentRunner(const RunConfig& cfg, const Graph& g);
  ExperimentRunner(ExperimentRunner&&) noexcept;
  ExperimentRunner& operator=(ExperimentRunner&&) noexcept;
  ~ExperimentRunner();

  bool done() const;
  void step();
  /// Completes the report; only valid once done().
  RunReport finish();

 private:
  struct State;
  std::unique_ptr<State> s_;
};

/// Runs cfg.iters layer iterations over `g` (the raw input graph) under
/// cfg.mode. Features and weights are seeded from cfg.seed.
RunReport run_experiment(const RunConfig& cfg, const Graph& g);

nlohmann::ordered_json to_json(const RunReport& report);
ReportTable iterations_table(const RunReport& report);
/// Clears every wall-clock field (for golden comparisons).
void zero_timings(RunReport& report);

/// Largest |a - b| / max(1, |b|) over all entries.
double max_relative_error(const FeatureMatrix& actual, const FeatureMatrix& expected);

struct AblationResult {
  std::vector<RunReport> runs;  // O1, O2, O3
  double max_rel_diff = 0;      // of O2/O3 outputs against O1
  bool equivalent = false;
  double tolerance = 1e-4;
};

/// Runs the same configuration under O1, O2 and O3, interleaving iterations.
AblationResult run_ablation(const RunConfig& cfg, const Graph& g);
ReportTable ablation_table(const AblationResult& result);
nlohmann::ordered_json to_json(const AblationResult& result);

struct CrossoverConfig {
  std::size_t num_vertices = 2048;
  std::vector<std::size_t> edge_counts;  // empty: 2^12 doubling up to V^2
  std::size_t feat_dim = 32;
  std::size_t reps = 5;
  std::uint64_t seed = 42;
  RmatParams rmat;
  bool check_oracle = true;
  std::size_t oracle_cap = kDenseReferenceCap;

  std::vector<std::size_t> ladder() const;
};

struct CrossoverTiming {
  KernelKind kernel = KernelKind::kCsrInter;
  double median_us = 0;
  double max_rel_error = 0;
};

struct CrossoverPoint {
  std::size_t edges = 0;
  double density = 0;
  std::vector<CrossoverTiming> timings;
  KernelKind best = KernelKind::kCsrInter;
  bool oracle_checked = false;
};

/// Times csr_inter, coo_atomic and the dense path (dense_block with one block
/// spanning the whole graph) on full RMAT graphs of increasing density, and
/// checks every kernel against the dense reference where it fits the cap.
std::vector<CrossoverPoint> run_crossover_sweep(const CrossoverConfig& cfg);
ReportTable crossover_table(const std::vector<CrossoverPoint>& points);

}  // namespace adaptgear
