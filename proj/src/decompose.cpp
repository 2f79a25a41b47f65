#include "adaptgear/decompose.hpp"

#include <algorithm>

#include "adaptgear/error.hpp"

namespace adaptgear {

DecomposedGraph decompose(const Graph& g, std::size_t block_size) {
  if (block_size == 0) throw Error("block size must be positive");
  std::vector<Edge> intra, inter;
  std::vector<Scalar> intra_w, inter_w;
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge e = edges[i];
    const bool local = e.dst / block_size == e.src / block_size;
    (local ? intra : inter).push_back(e);
    if (g.weighted()) (local ? intra_w : inter_w).push_back(g.weight(i));
  }

  DecomposedGraph d;
  d.block_size = block_size;
  d.num_vertices = g.num_vertices();
  d.full_in_degree = g.in_degrees();
  if (g.weighted()) {
    d.intra = Graph::from_edges(g.num_vertices(), std::move(intra), std::move(intra_w));
    d.inter = Graph::from_edges(g.num_vertices(), std::move(inter), std::move(inter_w));
  } else {
    d.intra = Graph::from_edges(g.num_vertices(), std::move(intra));
    d.inter = Graph::from_edges(g.num_vertices(), std::move(inter));
  }
  return d;
}

Graph recombine(const DecomposedGraph& d) {
  std::vector<Edge> edges(d.intra.edges().begin(), d.intra.edges().end());
  edges.insert(edges.end(), d.inter.edges().begin(), d.inter.edges().end());
  if (!d.intra.weighted() && !d.inter.weighted()) return Graph::from_edges(d.num_vertices, std::move(edges));
  std::vector<Scalar> w;
  w.reserve(edges.size());
  for (std::size_t i = 0; i < d.intra.num_edges(); ++i) w.push_back(d.intra.weight(i));
  for (std::size_t i = 0; i < d.inter.num_edges(); ++i) w.push_back(d.inter.weight(i));
  return Graph::from_edges(d.num_vertices, std::move(edges), std::move(w));
}

DensityReport density_report(const DecomposedGraph& d) {
  DensityReport r;
  const double v = static_cast<double>(d.num_vertices);
  const double e_intra = static_cast<double>(d.intra.num_edges());
  const double e_inter = static_cast<double>(d.inter.num_edges());
  r.num_communities = d.num_communities();
  if (d.num_vertices == 0) return r;

  double block_cells = 0;
  for (std::size_t c = 0; c < r.num_communities; ++c) {
    const double size = static_cast<double>(std::min(d.block_size, d.num_vertices - c * d.block_size));
    block_cells += size * size;
  }
  const double all_cells = v * v;
  const double off_cells = all_cells - block_cells;
  r.full_density = (e_intra + e_inter) / all_cells;
  r.intra_density = block_cells > 0 ? e_intra / block_cells : 0.0;
  r.inter_density = off_cells > 0 ? e_inter / off_cells : 0.0;
  r.intra_edge_fraction = (e_intra + e_inter) > 0 ? e_intra / (e_intra + e_inter) : 0.0;
  return r;
}

std::size_t csr_bytes(std::size_t num_vertices, std::size_t num_edges) {
  return (num_vertices + 1) * kCsrIndexBytes + num_edges * (kCsrIndexBytes + kCsrValueBytes);
}

TopologyBytes topology_memory_bytes(const DecomposedGraph& d) {
  return {csr_bytes(d.num_vertices, d.intra.num_edges()), csr_bytes(d.num_vertices, d.inter.num_edges()),
          csr_bytes(d.num_vertices, d.intra.num_edges() + d.inter.num_edges())};
}

double topology_overhead_fraction(const TopologyBytes& bytes, std::size_t num_vertices,
                                  std::size_t feat_dim) {
  const double extra = static_cast<double>(bytes.intra + bytes.inter);
  const double features = 2.0 * static_cast<double>(num_vertices * feat_dim * sizeof(Scalar));
  const double total = static_cast<double>(bytes.full) + extra + features;
  return total > 0 ? extra / total : 0.0;
}

}  // namespace adaptgear
