#include "adaptgear/pipeline.hpp"

#include <chrono>

#include "adaptgear/error.hpp"

namespace adaptgear {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kO1: return "O1";
    case Mode::kO2: return "O2";
    case Mode::kO3: return "O3";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::kO1, Mode::kO2, Mode::kO3}) {
    if (to_string(m) == name) return m;
  }
  throw Error("unknown mode '" + std::string(name) + "' (expected O1, O2 or O3)");
}

ReorderMethod ReorderMethod::parse(std::string_view spec) {
  ReorderMethod m;
  if (spec == "bfs") return m;
  if (spec == "none") {
    m.kind = Kind::kNone;
    return m;
  }
  if (spec.starts_with("file:") && spec.size() > 5) {
    m.kind = Kind::kFile;
    m.path = std::string(spec.substr(5));
    return m;
  }
  throw Error("unknown reorder method '" + std::string(spec) + "' (expected bfs, none or file:PATH)");
}

std::string ReorderMethod::str() const {
  switch (kind) {
    case Kind::kBfs: return "bfs";
    case Kind::kNone: return "none";
    case Kind::kFile: return "file:" + path.string();
  }
  return "?";
}

Partition make_partition(const Graph& g, const ReorderMethod& method, std::size_t comm_size,
                         std::uint64_t seed) {
  switch (method.kind) {
    case ReorderMethod::Kind::kBfs: return cluster_bfs(g, comm_size, seed);
    case ReorderMethod::Kind::kNone: return Partition::identity(g.num_vertices(), comm_size);
    case ReorderMethod::Kind::kFile: return load_partition(method.path, comm_size);
  }
  throw Error("unreachable reorder method");
}

Graph model_graph(const Graph& g, Model model) {
  return model == Model::kGcn ? gcn_normalize(g) : g;
}

Pipeline::Pipeline(const Graph& g, PipelineOptions options) : options_(std::move(options)) {
  auto start = Clock::now();
  partition_ = make_partition(g, options_.reorder, options_.comm_size, options_.seed);
  reordered_ = apply_reorder(g, partition_);
  times_.reorder_ms = elapsed_ms(start);

  start = Clock::now();
  decomposed_ = decompose(reordered_, options_.comm_size);
  if (options_.mode == Mode::kO1) {
    full_csr_ = to_csr(reordered_);
    full_in_degree_ = reordered_.in_degrees();
    times_.decompose_ms = 0;
    return;
  }
  PreparedSubgraphs prepared = prepare_subgraphs(decomposed_);
  times_.decompose_ms = elapsed_ms(start);

  SelectorState state =
      options_.mode == Mode::kO2
          ? make_selector({KernelKind::kCsrIntraBlocked}, {KernelKind::kCooAtomic}, options_.profile_iters,
                          options_.op)
          : make_default_selector(options_.op, options_.profile_iters);
  adaptive_.emplace(std::move(prepared), std::move(state), options_.op, options_.kernel);
}

std::size_t Pipeline::warmup_iterations() const {
  return make_default_selector(options_.op, options_.profile_iters).profiling_iterations();
}

FeatureMatrix Pipeline::aggregate(const FeatureMatrix& x, IterationRecord* record) {
  return unpermute_rows(aggregate_reordered(permute_rows(x, partition_), record), partition_);
}

const FeatureMatrix& Pipeline::aggregate_reordered(const FeatureMatrix& x, IterationRecord* record) {
  if (adaptive_) {
    ++iter_;
    return adaptive_->step(x, record);
  }
  const auto start = Clock::now();
  aggregate_csr_inter(full_csr_, x, options_.op, full_);
  finalize_into(full_, full_in_degree_);
  if (record) {
    const double us = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
    *record = {iter_, KernelKind::kCsrInter, KernelKind::kCsrInter, false, us, 0, us};
  }
  ++iter_;
  return full_.values;
}

FeatureMatrix gcn_layer_forward(Pipeline& pipeline, const FeatureMatrix& x, const LayerParams& p) {
  if (p.model != Model::kGcn) throw Error("gcn_layer_forward requires GCN parameters");
  if (pipeline.options().op != AggregateOp::kSum) throw Error("GCN aggregation must be sum");
  p.validate(x.dim());
  return linear(pipeline.aggregate(x), p);
}

FeatureMatrix gin_layer_forward(Pipeline& pipeline, const FeatureMatrix& x, const LayerParams& p) {
  if (p.model != Model::kGin) throw Error("gin_layer_forward requires GIN parameters");
  if (pipeline.options().op != AggregateOp::kSum) throw Error("GIN aggregation must be sum");
  p.validate(x.dim());
  return linear(gin_combine(x, pipeline.aggregate(x), p.gin_eps), p);
}

FeatureMatrix gcn_layer_forward(const Graph& g, const FeatureMatrix& x, const LayerParams& p,
                                PipelineOptions options) {
  options.op = AggregateOp::kSum;
  Pipeline pipeline(model_graph(g, Model::kGcn), std::move(options));
  return gcn_layer_forward(pipeline, x, p);
}

FeatureMatrix gin_layer_forward(const Graph& g, const FeatureMatrix& x, const LayerParams& p,
                                PipelineOptions options) {
  options.op = AggregateOp::kSum;
  Pipeline pipeline(g, std::move(options));
  return gin_layer_forward(pipeline, x, p);
}

}  // namespace adaptgear
