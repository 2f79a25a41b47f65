#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "adaptgear/decompose.hpp"
#include "adaptgear/layers.hpp"
#include "adaptgear/reorder.hpp"
#include "adaptgear/selector.hpp"

namespace adaptgear {

/// Execution modes of the aggregation step:
///   O1  full-graph CSR kernel, no decomposition
///   O2  static csr_intra_blocked + coo_atomic over the two subgraphs
///   O3  adaptive per-subgraph selection
enum class Mode { kO1, kO2, kO3 };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// "bfs", "none" or "file:PATH".
struct ReorderMethod {
  enum class Kind { kBfs, kNone, kFile } kind = Kind::kBfs;
  std::filesystem::path path;

  static ReorderMethod parse(std::string_view spec);
  std::string str() const;
};

struct PipelineOptions {
  Mode mode = Mode::kO3;
  std::size_t comm_size = 16;
  ReorderMethod reorder;
  AggregateOp op = AggregateOp::kSum;
  std::size_t profile_iters = 3;
  KernelOptions kernel;
  std::uint64_t seed = 42;
};

struct PreprocessingTimes {
  double reorder_ms = 0;
  double decompose_ms = 0;
};

/// Reorders a graph, decomposes it (O2/O3) and runs one aggregation per call.
/// Features are passed and returned in original vertex order.
class Pipeline {
 public:
  Pipeline(const Graph& g, PipelineOptions options);

  FeatureMatrix aggregate(const FeatureMatrix& x, IterationRecord* record = nullptr);
  /// Same as aggregate but on features already in reordered vertex order.
  /// The returned reference stays valid until the next call.
  const FeatureMatrix& aggregate_reordered(const FeatureMatrix& x, IterationRecord* record = nullptr);

  const PipelineOptions& options() const { return options_; }
  const Partition& partition() const { return partition_; }
  const Graph& reordered() const { return reordered_; }
  /// Always computed (for reporting); only O2/O3 execute on it.
  const DecomposedGraph& decomposed() const { return decomposed_; }
  const PreprocessingTimes& preprocessing() const { return times_; }
  /// Selector state for O2/O3; nullptr under O1.
  const SelectorState* selector() const { return adaptive_ ? &adaptive_->state() : nullptr; }
  std::size_t warmup_iterations() const;

 private:
  PipelineOptions options_;
  Partition partition_;
  Graph reordered_;
  DecomposedGraph decomposed_;
  PreprocessingTimes times_;
  CsrMatrix full_csr_;
  std::vector<std::uint32_t> full_in_degree_;
  PartialResult full_;
  std::optional<AdaptiveAggregator> adaptive_;
  std::size_t iter_ = 0;
};

Partition make_partition(const Graph& g, const ReorderMethod& method, std::size_t comm_size,
                         std::uint64_t seed);

/// Graph the aggregation runs on for a given model: GCN-normalized A + I for
/// gcn, the raw graph otherwise.
Graph model_graph(const Graph& g, Model model);

/// (A_hat X) W through the pipeline; the pipeline must be built on
/// model_graph(g, Model::kGcn) with sum aggregation.
FeatureMatrix gcn_layer_forward(Pipeline& pipeline, const FeatureMatrix& x, const LayerParams& p);
/// ((1 + eps) X + A X) W; the pipeline must use sum aggregation on the raw graph.
FeatureMatrix gin_layer_forward(Pipeline& pipeline, const FeatureMatrix& x, const LayerParams& p);

/// Convenience forms that build a single-use pipeline.
FeatureMatrix gcn_layer_forward(const Graph& g, const FeatureMatrix& x, const LayerParams& p,
                                PipelineOptions options);
FeatureMatrix gin_layer_forward(const Graph& g, const FeatureMatrix& x, const LayerParams& p,
                                PipelineOptions options);

}  // namespace adaptgear
