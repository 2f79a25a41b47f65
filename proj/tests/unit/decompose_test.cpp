#include <map>
#include <sstream>

#include "doctest.h"

#include "adaptgear/error.hpp"
#include "support.hpp"

using namespace adaptgear;

namespace {

Partition partition_from(const std::string& text, std::size_t comm_size) {
  std::istringstream in(text);
  return read_partition(in, comm_size);
}

}  // namespace

TEST_CASE("cluster_bfs: path graph splits into contiguous pairs") {
  const Graph path = Graph::from_edges(4, {{1, 0}, {0, 1}, {2, 1}, {1, 2}, {3, 2}, {2, 3}});
  const Partition p = cluster_bfs(path, 2);
  p.validate();
  CHECK(p.num_communities() == 2);
  CHECK(p.community_of[0] == p.community_of[1]);
  CHECK(p.community_of[2] == p.community_of[3]);
  CHECK(p.community_of[0] != p.community_of[2]);
}

TEST_CASE("cluster_bfs: one community when comm_size covers the graph") {
  const Graph g = Graph::from_edges(5, {{1, 0}, {4, 3}});
  const Partition p = cluster_bfs(g, 8);
  CHECK(p.num_communities() == 1);
  std::vector<bool> seen(5, false);
  for (VertexId v : p.permutation) seen.at(v) = true;
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST_CASE("cluster_bfs: recovers planted groups") {
  const PlantedGraph pg = generate_planted_partition({8, 16, 0.5, 0.01, 1});
  const Partition p = cluster_bfs(pg.graph, 16);
  std::size_t same = 0, total = 0;
  for (std::size_t u = 0; u < 128; ++u) {
    for (std::size_t v = u + 1; v < 128; ++v) {
      if (pg.labels[u] != pg.labels[v]) continue;
      ++total;
      same += p.community_of[u] == p.community_of[v];
    }
  }
  CHECK(static_cast<double>(same) / static_cast<double>(total) >= 0.9);
}

TEST_CASE("cluster_bfs: communities align to comm_size blocks") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testing::random_graph(rng, 300);
    const std::size_t b = 1 + rng() % 20;
    const Partition p = cluster_bfs(g, b);
    p.validate();
    for (std::size_t v = 0; v < g.num_vertices(); ++v) CHECK(p.permutation[v] / b == p.community_of[v]);
  }
}

TEST_CASE("partition file: stable order by community id") {
  const Partition a = partition_from("0\n0\n1\n1\n", 2);
  CHECK(a.permutation == std::vector<VertexId>{0, 1, 2, 3});
  CHECK(a.num_communities() == 2);

  const Partition b = partition_from("1\n0\n1\n0\n", 2);
  // new order: 1, 3, 0, 2
  CHECK(b.permutation == std::vector<VertexId>{2, 0, 3, 1});
}

TEST_CASE("partition file: oversized communities are chunked") {
  const Partition p = partition_from("0\n0\n0\n", 2);
  CHECK(p.num_communities() == 2);
  CHECK(p.community_of == std::vector<std::uint32_t>{0, 0, 1});
}

TEST_CASE("partition file: bad input") {
  CHECK_THROWS_AS(partition_from("", 2), Error);
  CHECK_THROWS_AS(partition_from("-1\n", 2), Error);
  CHECK_THROWS_AS(partition_from("a\n", 2), Error);
  CHECK_THROWS_AS(partition_from("0\n", 0), Error);
}

TEST_CASE("apply_reorder: identity and swap") {
  const Graph g = Graph::from_edges(2, {{1, 0}});
  CHECK(apply_reorder(g, Partition::identity(2, 1)) == g);

  Partition swap = Partition::identity(2, 1);
  swap.permutation = {1, 0};
  swap.community_of = {1, 0};
  const Graph r = apply_reorder(g, swap);
  REQUIRE(r.num_edges() == 1);
  CHECK(r.edges()[0] == Edge{0, 1});
  CHECK_THROWS_AS(apply_reorder(Graph::from_edges(3, {}), swap), Error);
}

TEST_CASE("permute_rows and unpermute_rows are inverse") {
  std::mt19937_64 rng(8);
  const Partition p = testing::random_partition(rng, 40, 4);
  const FeatureMatrix x = testing::random_matrix(rng, 40, 3);
  CHECK(unpermute_rows(permute_rows(x, p), p) == x);
}

TEST_CASE("reorder preserves degrees and commutes with aggregation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testing::random_graph(rng, 128);
    const Partition p = testing::random_partition(rng, g.num_vertices(), 1 + rng() % 16);
    const Graph r = apply_reorder(g, p);
    const auto deg = g.in_degrees();
    const auto rdeg = r.in_degrees();
    for (std::size_t v = 0; v < g.num_vertices(); ++v) CHECK(rdeg[p.permutation[v]] == deg[v]);

    const FeatureMatrix x = testing::random_matrix(rng, g.num_vertices(), 4);
    const FeatureMatrix lhs = permute_rows(aggregate_dense_reference(g, x, AggregateOp::kSum), p);
    const FeatureMatrix rhs = aggregate_dense_reference(r, permute_rows(x, p), AggregateOp::kSum);
    CHECK(testing::max_abs_difference(lhs, rhs) <= 1e-5);
  }
}

TEST_CASE("decompose: hand example") {
  const Graph g = Graph::from_edges(4, {{1, 0}, {3, 2}, {3, 0}});
  const DecomposedGraph d = decompose(g, 2);
  CHECK(d.intra == Graph::from_edges(4, {{1, 0}, {3, 2}}));
  CHECK(d.inter == Graph::from_edges(4, {{3, 0}}));
  CHECK(d.full_in_degree == std::vector<std::uint32_t>{0, 1, 0, 2});
  CHECK(recombine(d) == g);
  CHECK_THROWS_AS(decompose(g, 0), Error);
}

TEST_CASE("decompose: B = 1 keeps only self-loops inside") {
  const Graph g = Graph::from_edges(3, {{0, 0}, {1, 0}, {2, 2}});
  const DecomposedGraph d = decompose(g, 1);
  CHECK(d.intra == Graph::from_edges(3, {{0, 0}, {2, 2}}));
  CHECK(d.inter.num_edges() == 1);
}

TEST_CASE("decompose: B >= V leaves inter empty") {
  const Graph g = Graph::from_edges(3, {{0, 2}, {1, 0}}, std::vector<Scalar>{2, 3});
  const DecomposedGraph d = decompose(g, 3);
  CHECK(d.intra == g);
  CHECK(d.inter.num_edges() == 0);
  CHECK(d.inter.weighted());
}

TEST_CASE("decompose: exact partition of random edge sets") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = testing::random_graph(rng, 200);
    const std::size_t b = 1 + rng() % 32;
    const DecomposedGraph d = decompose(g, b);
    CHECK(d.intra.num_edges() + d.inter.num_edges() == g.num_edges());
    for (const Edge& e : d.intra.edges()) CHECK(e.dst / b == e.src / b);
    for (const Edge& e : d.inter.edges()) CHECK(e.dst / b != e.src / b);
    CHECK(recombine(d) == g);
  }
}

TEST_CASE("density report: formula and empty graph") {
  const DecomposedGraph d = decompose(Graph::from_edges(4, {{1, 0}, {3, 2}, {3, 0}}), 2);
  const DensityReport r = density_report(d);
  CHECK(r.full_density == doctest::Approx(3.0 / 16));
  CHECK(r.intra_density == doctest::Approx(2.0 / 8));
  CHECK(r.inter_density == doctest::Approx(1.0 / 8));
  CHECK(r.num_communities == 2);
  CHECK(r.intra_edge_fraction == doctest::Approx(2.0 / 3));

  const DensityReport e = density_report(decompose(Graph::from_edges(4, {}), 2));
  CHECK(e.full_density == 0);
  CHECK(e.intra_density == 0);
  CHECK(e.inter_density == 0);
}

TEST_CASE("density report agrees with brute-force cell counting") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const Graph g = testing::random_graph(rng, 256);
    const std::size_t n = g.num_vertices();
    const std::size_t b = 1 + rng() % 24;
    std::size_t intra_cells = 0, intra_edges = 0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) intra_cells += r / b == c / b;
    for (const Edge& e : g.edges()) intra_edges += e.dst / b == e.src / b;
    const std::size_t inter_cells = n * n - intra_cells;
    const DensityReport r = density_report(decompose(g, b));
    CHECK(r.intra_density == doctest::Approx(static_cast<double>(intra_edges) / intra_cells));
    const double inter = inter_cells ? static_cast<double>(g.num_edges() - intra_edges) / inter_cells : 0.0;
    CHECK(r.inter_density == doctest::Approx(inter));
  }
}

TEST_CASE("planted graph separates intra and inter density") {
  const PlantedGraph pg = generate_planted_partition({8, 16, 0.5, 0.01, 1});
  const DecomposedGraph d = decompose(apply_reorder(pg.graph, cluster_bfs(pg.graph, 16)), 16);
  const DensityReport r = density_report(d);
  CHECK(r.intra_density > 10 * r.inter_density);
}

TEST_CASE("topology bytes: formula and CSR algebra bound") {
  const TopologyBytes empty = topology_memory_bytes(decompose(Graph::from_edges(3, {}), 2));
  CHECK(empty.full == 16);

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const Graph g = testing::random_graph(rng, 300);
    const std::size_t n = g.num_vertices();
    const TopologyBytes t = topology_memory_bytes(decompose(g, 1 + rng() % 16));
    CHECK(t.full == csr_bytes(n, g.num_edges()));
    CHECK(t.intra + t.inter >= t.full - (n + 1) * 4);
    CHECK(t.intra + t.inter <= t.full + (n + 1) * 4);
  }
}

TEST_CASE("overhead fraction") {
  const TopologyBytes t{100, 50, 140};
  // (100 + 50) / (140 + 150 + 2 * 10 * 4 * 4)
  CHECK(topology_overhead_fraction(t, 10, 4) == doctest::Approx(150.0 / (140 + 150 + 320)));
}
