#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "adaptgear/error.hpp"
#include "adaptgear/experiments.hpp"
#include "support.hpp"

using namespace adaptgear;

namespace {

PipelineOptions options(Mode mode, AggregateOp op = AggregateOp::kSum, std::size_t comm_size = 8) {
  PipelineOptions o;
  o.mode = mode;
  o.op = op;
  o.comm_size = comm_size;
  return o;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("mode and model names") {
  CHECK(parse_mode("O2") == Mode::kO2);
  CHECK_THROWS_AS(parse_mode("O4"), Error);
  CHECK(parse_model("agg_only") == Model::kAggOnly);
  CHECK(parse_model("gin") == Model::kGin);
  CHECK_THROWS_AS(parse_model("sage"), Error);
  CHECK(ReorderMethod::parse("file:parts.txt").path == "parts.txt");
  CHECK(ReorderMethod::parse("none").str() == "none");
  CHECK_THROWS_AS(ReorderMethod::parse("metis"), Error);
}

TEST_CASE("gcn_normalize weights") {
  const Graph g = gcn_normalize(Graph::from_edges(2, {{1, 0}}));
  // A + I: vertex 0 has in-degree 1, vertex 1 has in-degree 2
  REQUIRE(g.num_edges() == 3);
  CHECK(g.weight(0) == doctest::Approx(1.0));
  CHECK(g.weight(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(g.weight(2) == doctest::Approx(0.5));
}

TEST_CASE("gcn: single vertex is the identity") {
  const FeatureMatrix x(1, 3, std::vector<Scalar>{1, -2, 3});
  const LayerParams p = LayerParams::identity(Model::kGcn, 3);
  CHECK(gcn_layer_forward(Graph::from_edges(1, {{0, 0}}), x, p, options(Mode::kO1)) == x);
}

TEST_CASE("gcn: 2-clique with constant features gives equal rows") {
  const Graph g = Graph::from_edges(2, {{0, 1}, {1, 0}});
  const FeatureMatrix x(2, 2, 0.75f);
  const FeatureMatrix y = gcn_layer_forward(g, x, LayerParams::seeded(Model::kGcn, 2, 3, 4), options(Mode::kO3));
  for (std::size_t f = 0; f < 3; ++f) CHECK(y.at(0, f) == y.at(1, f));
}

TEST_CASE("gin: edgeless identity and single edge") {
  const LayerParams p = LayerParams::identity(Model::kGin, 1);
  const FeatureMatrix x(2, 1, std::vector<Scalar>{1, 10});
  CHECK(gin_layer_forward(Graph::from_edges(2, {}), x, p, options(Mode::kO2)) == x);
  // edge 1 <- 0 with x = [[1], [10]] gives row 1 = 10 + 1
  const FeatureMatrix y = gin_layer_forward(Graph::from_edges(2, {{1, 0}}), x, p, options(Mode::kO1));
  CHECK(y.at(1, 0) == 11);
  CHECK(y.at(0, 0) == 1);
}

TEST_CASE("layer parameter checks") {
  const FeatureMatrix x(4, 3);
  const Graph g = Graph::from_edges(4, {{1, 0}});
  CHECK_THROWS_AS(gcn_layer_forward(g, x, LayerParams::seeded(Model::kGcn, 2, 2, 1), options(Mode::kO1)), Error);
  CHECK_THROWS_AS(gcn_layer_forward(g, x, LayerParams::seeded(Model::kGin, 3, 2, 1), options(Mode::kO1)), Error);
  Pipeline max_pipeline(g, options(Mode::kO1, AggregateOp::kMax));
  CHECK_THROWS_AS(gin_layer_forward(max_pipeline, x, LayerParams::seeded(Model::kGin, 3, 2, 1)), Error);
  const LayerParams a = LayerParams::seeded(Model::kGcn, 3, 2, 9);
  CHECK(a.weight == LayerParams::seeded(Model::kGcn, 3, 2, 9).weight);
  for (Scalar w : a.weight) CHECK(std::abs(w) <= 0.1f);
}

TEST_CASE("gcn and gin match dense oracles on random 128-vertex graphs in every mode") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const Graph raw = generate_uniform(128, 600 + 200 * trial, false, trial + 1);
    const Graph g = Graph::from_edges(128, std::vector<Edge>(raw.edges().begin(), raw.edges().end()));
    const FeatureMatrix x = testing::random_matrix(rng, 128, 8);
    const LayerParams gcn = LayerParams::seeded(Model::kGcn, 8, 6, trial);
    const LayerParams gin = LayerParams::seeded(Model::kGin, 8, 6, trial, 0.25f);
    const auto gcn_expected = testing::oracle_gcn(g, x, gcn);
    const auto gin_expected = testing::oracle_gin(g, x, gin);
    for (Mode mode : {Mode::kO1, Mode::kO2, Mode::kO3}) {
      CHECK(testing::rel_error(gcn_layer_forward(g, x, gcn, options(mode)), gcn_expected) <= 1e-4);
      CHECK(testing::rel_error(gin_layer_forward(g, x, gin, options(mode)), gin_expected) <= 1e-4);
    }
  }
}

TEST_CASE("pipeline aggregation matches the oracle for every mode, op and reorder") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 12; ++trial) {
    const Graph g = testing::random_graph(rng, 256);
    const FeatureMatrix x = testing::random_matrix(rng, g.num_vertices(), 5);
    for (auto op : {AggregateOp::kSum, AggregateOp::kMean, AggregateOp::kMax}) {
      const auto expected = testing::oracle_aggregate(g, x, op);
      for (Mode mode : {Mode::kO1, Mode::kO2, Mode::kO3}) {
        PipelineOptions o = options(mode, op, 1 + rng() % 16);
        if (trial % 3 == 0) o.reorder = ReorderMethod::parse("none");
        Pipeline p(g, o);
        for (int i = 0; i < 8; ++i) {
          const FeatureMatrix y = p.aggregate(x);
          if (op == AggregateOp::kMax) {
            CHECK(testing::exactly_equal(y, expected));
          } else {
            CHECK(testing::rel_error(y, expected) <= 1e-4);
          }
        }
      }
    }
  }
}

TEST_CASE("O1 skips decomposition timing and has no selector") {
  const Graph g = generate_planted_partition({4, 8, 0.5, 0.05, 2}).graph;
  Pipeline p(g, options(Mode::kO1));
  CHECK(p.selector() == nullptr);
  CHECK(p.preprocessing().decompose_ms == 0);
  Pipeline q(g, options(Mode::kO2));
  REQUIRE(q.selector() != nullptr);
  CHECK(q.selector()->candidates_intra == std::vector<KernelKind>{KernelKind::kCsrIntraBlocked});
  CHECK(q.selector()->candidates_inter == std::vector<KernelKind>{KernelKind::kCooAtomic});
}

TEST_CASE("partition file reorder") {
  const auto path = std::filesystem::temp_directory_path() / "adaptgear_parts.txt";
  {
    std::ofstream out(path);
    out << "1\n0\n1\n0\n";
  }
  const Graph g = Graph::from_edges(4, {{1, 0}, {3, 2}});
  const Partition p = make_partition(g, ReorderMethod::parse("file:" + path.string()), 2, 0);
  std::filesystem::remove(path);
  CHECK(p.permutation == std::vector<VertexId>{2, 0, 3, 1});
  CHECK_THROWS_AS(make_partition(Graph::from_edges(5, {}), ReorderMethod::parse("file:/nonexistent"), 2, 0), Error);
}

TEST_CASE("O1 and O2 are bitwise deterministic across runs") {
  RunConfig c;
  c.source = GraphSource::parse_planted("8,16,0.5,0.02");
  c.iters = 12;
  c.feat_dim = 8;
  for (Mode mode : {Mode::kO1, Mode::kO2}) {
    c.mode = mode;
    const Graph g = load_graph(c.source, c.seed);
    // coo_atomic is only order-independent with one thread; O2 uses it for inter edges
    if (mode == Mode::kO2) c.threads = 1;
    CHECK(testing::bitwise_equal(run_experiment(c, g).output, run_experiment(c, g).output));
  }
}

TEST_CASE("graph sources") {
  CHECK(GraphSource::parse_rmat("64,128").rmat_edges == 128);
  CHECK_THROWS_AS(GraphSource::parse_rmat("64"), Error);
  CHECK_THROWS_AS(GraphSource::parse_planted("4,8,1.5,0.1"), Error);
  const GraphSource s = GraphSource::parse_planted("4,8,0.5,0.1");
  CHECK(load_graph(s, 3).num_vertices() == 32);
  CHECK(load_graph(GraphSource::parse_rmat("64,128"), 1).num_edges() == 128);
}

TEST_CASE("run report schema") {
  RunConfig c;
  c.source = GraphSource::parse_planted("4,8,0.5,0.05");
  c.iters = 10;
  c.feat_dim = 4;
  c.model = Model::kGcn;
  const RunReport r = run_experiment(c, load_graph(c.source, c.seed));
  const auto j = to_json(r);
  for (const char* key : {"config", "density", "preprocessing_ms", "topology_bytes", "iterations", "locked", "totals"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["preprocessing_ms"].contains("reorder"));
  CHECK(j["preprocessing_ms"].contains("decompose"));
  CHECK(j["topology_bytes"].contains("overhead_fraction"));
  CHECK(j["iterations"].size() == 10);
  CHECK(j["iterations"][0].contains("us"));
  CHECK(r.locked_intra.has_value());
  CHECK(iterations_table(r).rows.size() == 10);
  CHECK_THROWS_AS([&] {
    RunConfig bad = c;
    bad.iters = 0;
    run_experiment(bad, load_graph(c.source, c.seed));
  }(), Error);
}

TEST_CASE("ablation modes agree") {
  RunConfig c;
  c.source = GraphSource::parse_planted("8,16,0.5,0.01");
  c.iters = 12;
  c.feat_dim = 8;
  for (auto op : {AggregateOp::kSum, AggregateOp::kMean, AggregateOp::kMax}) {
    c.op = op;
    const AblationResult r = run_ablation(c, load_graph(c.source, c.seed));
    REQUIRE(r.runs.size() == 3);
    CHECK(r.equivalent);
    CHECK(r.runs[0].config.mode == Mode::kO1);
    CHECK(ablation_table(r).rows.size() == 3);
    CHECK(to_json(r)["equivalence"]["equivalent"] == true);
  }
}

TEST_CASE("crossover sweep on a small ladder") {
  CrossoverConfig c;
  c.num_vertices = 64;
  c.edge_counts = {1, 64, 4096};
  c.reps = 2;
  const auto points = run_crossover_sweep(c);
  REQUIRE(points.size() == 3);
  CHECK(points[0].edges == 1);
  CHECK(points[2].density == 1.0);
  for (const auto& p : points) {
    CHECK(p.oracle_checked);
    CHECK(p.timings.size() == 3);
    for (const auto& t : p.timings) CHECK(t.max_rel_error <= 1e-4);
  }
  const ReportTable t = crossover_table(points);
  CHECK(t.rows.size() == 9);

  CrossoverConfig d;
  d.num_vertices = 2048;
  CHECK(d.ladder().front() == 4096);
  CHECK(d.ladder().back() == 2048u * 2048u);
}

TEST_CASE("golden report of a tiny O2 run") {
  RunConfig c;
  c.source = GraphSource::parse_planted("4,8,0.5,0.05");
  c.mode = Mode::kO2;
  c.iters = 5;
  c.feat_dim = 4;
  c.threads = 1;
  RunReport r = run_experiment(c, load_graph(c.source, c.seed));
  zero_timings(r);
  const std::string actual = to_json(r).dump(2) + "\n";
  const std::filesystem::path golden = std::filesystem::path(ADAPTGEAR_GOLDEN_DIR) / "report_o2.json";
  if (std::getenv("ADAPTGEAR_UPDATE_GOLDEN")) {
    std::ofstream(golden) << actual;
  }
  CHECK(actual == read_file(golden));
}
