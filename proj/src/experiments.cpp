#include "adaptgear/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "adaptgear/error.hpp"
#include "adaptgear/io.hpp"

namespace adaptgear {
namespace {

using Clock = std::chrono::steady_clock;
using ordered_json = nlohmann::ordered_json;

double since_us(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t to_count(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw Error("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

double to_real(std::string_view s, std::string_view what) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw Error("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

int active_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <typename Fn>
double median_time_us(std::size_t reps, Fn&& fn) {
  std::vector<double> samples;
  samples.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    fn();
    samples.push_back(since_us(start));
  }
  return median(std::move(samples));
}

}  // namespace

GraphSource GraphSource::file(std::filesystem::path path, bool weighted) {
  GraphSource s;
  s.kind = Kind::kFile;
  s.path = std::move(path);
  s.weighted = weighted;
  return s;
}

GraphSource GraphSource::parse_rmat(std::string_view spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 2) throw Error("--rmat expects V,E");
  GraphSource s;
  s.kind = Kind::kRmat;
  s.rmat_vertices = to_count(parts[0], "RMAT vertex count");
  s.rmat_edges = to_count(parts[1], "RMAT edge count");
  return s;
}

GraphSource GraphSource::parse_planted(std::string_view spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 4) throw Error("--planted expects groups,group_size,p_in,p_out");
  GraphSource s;
  s.kind = Kind::kPlanted;
  s.planted.groups = to_count(parts[0], "group count");
  s.planted.group_size = to_count(parts[1], "group size");
  s.planted.p_in = to_real(parts[2], "p_in");
  s.planted.p_out = to_real(parts[3], "p_out");
  if (s.planted.p_in < 0 || s.planted.p_in > 1 || s.planted.p_out < 0 || s.planted.p_out > 1) {
    throw Error("--planted probabilities must lie in [0, 1]");
  }
  s.planted.seed = 0;
  return s;
}

std::string GraphSource::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::kFile:
      out << "file:" << path.string() << (weighted ? " (weighted)" : "");
      break;
    case Kind::kRmat:
      out << "rmat:" << rmat_vertices << ',' << rmat_edges;
      break;
    case Kind::kPlanted:
      out << "planted:" << planted.groups << ',' << planted.group_size << ',' << planted.p_in << ','
          << planted.p_out;
      break;
  }
  return out.str();
}

Graph load_graph(const GraphSource& source, std::uint64_t seed) {
  switch (source.kind) {
    case GraphSource::Kind::kFile: return load_edge_list(source.path, source.weighted);
    case GraphSource::Kind::kRmat:
      return generate_rmat(source.rmat_vertices, source.rmat_edges, source.rmat, seed);
    case GraphSource::Kind::kPlanted: {
      PlantedPartitionParams p = source.planted;
      if (p.seed == 0) p.seed = seed;
      return generate_planted_partition(p).graph;
    }
  }
  throw Error("unreachable graph source");
}

AggregateOp RunConfig::effective_op() const {
  return model == Model::kAggOnly ? op : AggregateOp::kSum;
}

PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions o;
  o.mode = mode;
  o.comm_size = comm_size;
  o.reorder = reorder;
  o.op = effective_op();
  o.profile_iters = profile_iters;
  o.kernel = kernel;
  o.seed = seed;
  return o;
}

double max_relative_error(const FeatureMatrix& actual, const FeatureMatrix& expected) {
  if (actual.num_vertices() != expected.num_vertices() || actual.dim() != expected.dim()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0;
  const auto a = actual.values();
  const auto e = expected.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(static_cast<double>(a[i]) - static_cast<double>(e[i]));
    worst = std::max(worst, diff / std::max(1.0, std::abs(static_cast<double>(e[i]))));
  }
  return worst;
}

struct ExperimentRunner::State {
  RunReport report;
  Graph model_g;
  std::optional<Pipeline> pipeline;
  FeatureMatrix x_reordered;
  std::optional<LayerParams> params;
  FeatureMatrix last;
};

ExperimentRunner::ExperimentRunner(const RunConfig& cfg, const Graph& g) : s_(std::make_unique<State>()) {
  if (cfg.iters == 0) throw Error("at least one iteration is required");
  if (cfg.feat_dim == 0) throw Error("feature dimension must be positive");
  RunReport& report = s_->report;
  report.config = cfg;

  s_->model_g = model_graph(g, cfg.model);
  const Pipeline& pipeline = s_->pipeline.emplace(s_->model_g, cfg.pipeline_options());
  const DecomposedGraph& d = pipeline.decomposed();
  report.num_vertices = s_->model_g.num_vertices();
  report.num_edges = s_->model_g.num_edges();
  report.density = density_report(d);
  report.preprocessing = pipeline.preprocessing();
  report.topology = topology_memory_bytes(d);
  report.overhead_fraction = topology_overhead_fraction(report.topology, d.num_vertices, cfg.feat_dim);

  const FeatureMatrix x = random_features(s_->model_g.num_vertices(), cfg.feat_dim, cfg.seed + 1);
  s_->x_reordered = permute_rows(x, pipeline.partition());
  if (cfg.model != Model::kAggOnly) {
    s_->params = LayerParams::seeded(cfg.model, cfg.feat_dim, cfg.feat_dim, cfg.seed + 2);
  }
  report.iterations.reserve(cfg.iters);
}

ExperimentRunner::ExperimentRunner(ExperimentRunner&&) noexcept = default;
ExperimentRunner& ExperimentRunner::operator=(ExperimentRunner&&) noexcept = default;
ExperimentRunner::~ExperimentRunner() = default;

bool ExperimentRunner::done() const { return s_->report.iterations.size() >= s_->report.config.iters; }

void ExperimentRunner::step() {
  if (done()) throw Error("experiment already finished");
  RunReport& report = s_->report;
  IterationRecord rec;
  const FeatureMatrix& aggregated = s_->pipeline->aggregate_reordered(s_->x_reordered, &rec);
  const auto start = Clock::now();
  switch (report.config.model) {
    case Model::kGcn: s_->last = linear(aggregated, *s_->params); break;
    case Model::kGin: s_->last = linear(gin_combine(s_->x_reordered, aggregated, s_->params->gin_eps), *s_->params); break;
    case Model::kAggOnly: s_->last = aggregated; break;
  }
  report.totals.update_total_us += since_us(start);
  report.iterations.push_back(rec);
}

RunReport ExperimentRunner::finish() {
  if (!done()) throw Error("experiment has iterations left");
  RunReport& report = s_->report;
  const Pipeline& pipeline = *s_->pipeline;
  report.output = unpermute_rows(s_->last, pipeline.partition());
  if (const SelectorState* s = pipeline.selector(); s && s->phase == SelectorPhase::kLocked) {
    report.locked_intra = s->choice_intra;
    report.locked_inter = s->choice_inter;
  }
  const std::size_t iters = report.config.iters;
  report.totals.iterations = iters;
  report.totals.warmup_iterations = std::min(iters - 1, pipeline.warmup_iterations());
  std::vector<double> steady;
  for (const auto& rec : report.iterations) {
    report.totals.total_us += rec.total_us;
    if (rec.i >= report.totals.warmup_iterations) steady.push_back(rec.total_us);
  }
  report.totals.steady_median_us = median(std::move(steady));
  return std::move(report);
}

RunReport run_experiment(const RunConfig& cfg, const Graph& g) {
  ExperimentRunner runner(cfg, g);
  while (!runner.done()) runner.step();
  return runner.finish();
}

nlohmann::ordered_json to_json(const RunReport& r) {
  const RunConfig& c = r.config;
  ordered_json config = {
      {"source", c.source.describe()},
      {"num_vertices", r.num_vertices},
      {"num_edges", r.num_edges},
      {"comm_size", c.comm_size},
      {"reorder", c.reorder.str()},
      {"mode", to_string(c.mode)},
      {"op", to_string(c.effective_op())},
      {"model", to_string(c.model)},
      {"feat_dim", c.feat_dim},
      {"iters", c.iters},
      {"profile_iters", c.profile_iters},
      {"seed", c.seed},
      {"threads", c.threads > 0 ? c.threads : active_threads()},
      {"tile_budget_bytes", c.kernel.tile_budget_bytes == kUnboundedTileBudget
                                ? ordered_json(nullptr)
                                : ordered_json(c.kernel.tile_budget_bytes)},
  };
  ordered_json notes = ordered_json::array();
  if (c.source.kind == GraphSource::Kind::kRmat) {
    config["rmat_probs"] = {c.source.rmat.a, c.source.rmat.b, c.source.rmat.c, c.source.rmat.d};
    notes.push_back("RMAT probabilities are conventional generator defaults, not measured values");
  }
  notes.push_back("selector statistic: median of profile_iters timings per candidate");
  if (c.effective_op() == AggregateOp::kMax) {
    notes.push_back("coo_atomic max uses a compare-exchange loop; dense_block is excluded for max");
  }
  config["notes"] = notes;

  ordered_json iterations = ordered_json::array();
  for (const auto& rec : r.iterations) {
    iterations.push_back({{"i", rec.i},
                          {"kernel_intra", to_string(rec.kernel_intra)},
                          {"kernel_inter", c.mode == Mode::kO1 ? "none" : to_string(rec.kernel_inter)},
                          {"us", rec.total_us}});
  }
  auto kernel_or_null = [](const std::optional<KernelKind>& k) {
    return k ? ordered_json(to_string(*k)) : ordered_json(nullptr);
  };

  return {
      {"config", config},
      {"density", {{"full", r.density.full_density},
                   {"intra", r.density.intra_density},
                   {"inter", r.density.inter_density},
                   {"num_communities", r.density.num_communities},
                   {"intra_edge_fraction", r.density.intra_edge_fraction}}},
      {"preprocessing_ms", {{"reorder", r.preprocessing.reorder_ms}, {"decompose", r.preprocessing.decompose_ms}}},
      {"topology_bytes", {{"full", r.topology.full},
                          {"intra", r.topology.intra},
                          {"inter", r.topology.inter},
                          {"overhead_fraction", r.overhead_fraction}}},
      {"iterations", iterations},
      {"locked", {{"intra", kernel_or_null(r.locked_intra)}, {"inter", kernel_or_null(r.locked_inter)}}},
      {"totals", {{"iterations", r.totals.iterations},
                  {"warmup_iterations", r.totals.warmup_iterations},
                  {"total_us", r.totals.total_us},
                  {"steady_median_us", r.totals.steady_median_us},
                  {"update_total_us", r.totals.update_total_us}}},
  };
}

ReportTable iterations_table(const RunReport& r) {
  ReportTable t;
  t.columns = {"i", "kernel_intra", "kernel_inter", "profiling", "intra_us", "inter_us", "us"};
  for (const auto& rec : r.iterations) {
    t.add_row({static_cast<std::int64_t>(rec.i), std::string(to_string(rec.kernel_intra)),
               r.config.mode == Mode::kO1 ? std::string("none") : std::string(to_string(rec.kernel_inter)),
               static_cast<std::int64_t>(rec.profiling), rec.intra_us, rec.inter_us, rec.total_us});
  }
  return t;
}

void zero_timings(RunReport& r) {
  r.preprocessing = {};
  r.totals.total_us = 0;
  r.totals.steady_median_us = 0;
  r.totals.update_total_us = 0;
  for (auto& rec : r.iterations) {
    rec.intra_us = 0;
    rec.inter_us = 0;
    rec.total_us = 0;
  }
}

AblationResult run_ablation(const RunConfig& cfg, const Graph& g) {
  AblationResult result;
  std::vector<ExperimentRunner> runners;
  for (Mode mode : {Mode::kO1, Mode::kO2, Mode::kO3}) {
    RunConfig c = cfg;
    c.mode = mode;
    runners.emplace_back(c, g);
  }
  // Round-robin across modes so slow drift in machine speed hits all three.
  for (std::size_t i = 0; i < cfg.iters; ++i) {
    for (auto& r : runners) r.step();
  }
  for (auto& r : runners) result.runs.push_back(r.finish());
  for (std::size_t i = 1; i < result.runs.size(); ++i) {
    result.max_rel_diff =
        std::max(result.max_rel_diff, max_relative_error(result.runs[i].output, result.runs[0].output));
  }
  result.equivalent = result.max_rel_diff <= result.tolerance;
  return result;
}

ReportTable ablation_table(const AblationResult& result) {
  ReportTable t;
  t.columns = {"mode", "iterations", "total_us", "steady_median_us", "reorder_ms", "decompose_ms",
               "locked_intra", "locked_inter"};
  for (const auto& r : result.runs) {
    t.add_row({std::string(to_string(r.config.mode)), static_cast<std::int64_t>(r.totals.iterations),
               r.totals.total_us, r.totals.steady_median_us, r.preprocessing.reorder_ms,
               r.preprocessing.decompose_ms,
               r.locked_intra ? std::string(to_string(*r.locked_intra)) : std::string("none"),
               r.locked_inter ? std::string(to_string(*r.locked_inter)) : std::string("none")});
  }
  return t;
}

nlohmann::ordered_json to_json(const AblationResult& result) {
  ordered_json runs = ordered_json::array();
  for (const auto& r : result.runs) runs.push_back(to_json(r));
  return {{"modes", runs},
          {"equivalence", {{"max_rel_diff", result.max_rel_diff},
                           {"tolerance", result.tolerance},
                           {"equivalent", result.equivalent}}}};
}

std::vector<std::size_t> CrossoverConfig::ladder() const {
  if (!edge_counts.empty()) return edge_counts;
  std::vector<std::size_t> out;
  const std::size_t cells = num_vertices * num_vertices;
  for (std::size_t e = 4096; e < cells; e *= 2) out.push_back(e);
  out.push_back(cells);
  return out;
}

std::vector<CrossoverPoint> run_crossover_sweep(const CrossoverConfig& cfg) {
  if (cfg.reps == 0) throw Error("crossover sweep needs at least one repetition");
  const std::size_t n = cfg.num_vertices;
  const FeatureMatrix x = random_features(n, cfg.feat_dim, cfg.seed + 1);
  std::vector<CrossoverPoint> points;
  for (std::size_t edges : cfg.ladder()) {
    const Graph g = generate_rmat(n, edges, cfg.rmat, cfg.seed);
    const CsrMatrix csr = to_csr(g);
    const CooMatrix coo = to_coo(g);
    const DenseBlockSet dense = to_dense_blocks(g, std::max<std::size_t>(n, 1));

    CrossoverPoint point;
    point.edges = g.num_edges();
    point.density = n ? static_cast<double>(point.edges) / (static_cast<double>(n) * n) : 0.0;
    std::optional<FeatureMatrix> truth;
    if (cfg.check_oracle && n <= cfg.oracle_cap) {
      truth = aggregate_dense_reference(g, x, AggregateOp::kSum, cfg.oracle_cap);
      point.oracle_checked = true;
    }

    auto measure = [&](KernelKind kind, auto&& kernel) {
      PartialResult out;
      CrossoverTiming t;
      t.kernel = kind;
      kernel(out);  // untimed first touch of the output buffer
      t.median_us = median_time_us(cfg.reps, [&] { kernel(out); });
      if (truth) t.max_rel_error = max_relative_error(out.values, *truth);
      point.timings.push_back(t);
    };
    measure(KernelKind::kCsrInter, [&](PartialResult& o) { aggregate_csr_inter(csr, x, AggregateOp::kSum, o); });
    measure(KernelKind::kCooAtomic, [&](PartialResult& o) { aggregate_coo_atomic(coo, x, AggregateOp::kSum, o); });
    measure(KernelKind::kDenseBlock,
            [&](PartialResult& o) { aggregate_dense_block(dense, x, AggregateOp::kSum, o); });

    point.best = std::min_element(point.timings.begin(), point.timings.end(),
                                  [](const auto& a, const auto& b) { return a.median_us < b.median_us; })
                     ->kernel;
    points.push_back(std::move(point));
  }
  return points;
}

ReportTable crossover_table(const std::vector<CrossoverPoint>& points) {
  ReportTable t;
  t.columns = {"edges", "density", "kernel", "median_us", "max_rel_error", "best"};
  for (const auto& p : points) {
    for (const auto& timing : p.timings) {
      t.add_row({static_cast<std::int64_t>(p.edges), p.density, std::string(to_string(timing.kernel)),
                 timing.median_us, timing.max_rel_error, static_cast<std::int64_t>(timing.kernel == p.best)});
    }
  }
  return t;
}

}  // namespace adaptgear
