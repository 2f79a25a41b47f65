#pragma once

#include <cstdint>
#include <vector>

#include "adaptgear/graph.hpp"

namespace adaptgear {

/// A reordered graph split by block index floor(id / B): edges whose
/// endpoints share a block form the intra-community subgraph (the diagonal
/// blocks of the adjacency matrix), the rest form the inter-community one.
struct DecomposedGraph {
  Graph intra;
  Graph inter;
  std::size_t block_size = 0;
  std::size_t num_vertices = 0;
  std::vector<std::uint32_t> full_in_degree;

  std::size_t num_communities() const {
    return block_size == 0 ? 0 : (num_vertices + block_size - 1) / block_size;
  }
};

DecomposedGraph decompose(const Graph& g, std::size_t block_size);

/// Union of the two subgraphs; equals the decomposed input.
Graph recombine(const DecomposedGraph& d);

struct DensityReport {
  double full_density = 0;
  double intra_density = 0;
  double inter_density = 0;
  std::size_t num_communities = 0;
  double intra_edge_fraction = 0;
};

/// Edge density of the full graph and of both subgraphs, each relative to the
/// number of adjacency cells the subgraph can occupy. Diagonal block cells
/// are counted with the true (possibly ragged) size of the last block.
DensityReport density_report(const DecomposedGraph& d);

struct TopologyBytes {
  std::size_t intra = 0;
  std::size_t inter = 0;
  std::size_t full = 0;
};

/// Width in bytes of each CSR array element (32-bit offsets, ids and values).
inline constexpr std::size_t kCsrIndexBytes = 4;
inline constexpr std::size_t kCsrValueBytes = 4;

std::size_t csr_bytes(std::size_t num_vertices, std::size_t num_edges);

/// CSR storage (row_ptr + col_idx + val) for both subgraphs and the full graph.
TopologyBytes topology_memory_bytes(const DecomposedGraph& d);

/// Share of an aggregation layer's footprint taken by the extra subgraph
/// topology: (intra + inter) / (full + intra + inter + input and output
/// features of width feat_dim).
double topology_overhead_fraction(const TopologyBytes& bytes, std::size_t num_vertices,
                                  std::size_t feat_dim);

}  // namespace adaptgear
