#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "adaptgear/graph.hpp"

namespace adaptgear {

/// Vertex-to-community assignment and the relabeling that makes every
/// community a contiguous id range of length <= comm_size.
struct Partition {
  std::size_t num_vertices = 0;
  std::size_t comm_size = 0;
  std::vector<std::uint32_t> community_of;  // indexed by original id
  std::vector<VertexId> permutation;         // old id -> new id

  std::size_t num_communities() const;

  /// Throws if the permutation is not a bijection, community indices are not
  /// contiguous from 0, or a community's new-id range is not contiguous or
  /// exceeds comm_size.
  void validate() const;

  static Partition identity(std::size_t num_vertices, std::size_t comm_size);
};

/// Greedy region-growing clusterer. Seeds each community at the unassigned
/// vertex of highest (undirected) degree and repeatedly absorbs the frontier
/// vertex with the most edges into the region, until comm_size vertices are
/// collected. When the frontier runs dry the community is topped up from the
/// next seed, so every community but the last holds exactly comm_size
/// vertices and aligns with the fixed-width block ranges used downstream.
/// Ties are broken by ascending vertex id; the result is fully determined by
/// the graph (seed is accepted for interface stability).
Partition cluster_bfs(const Graph& g, std::size_t comm_size, std::uint64_t seed = 0);

/// Builds a partition from externally computed community ids (for example a
/// METIS part file): one id per line, vertex order = original ids. Vertices
/// are stable-sorted by id and oversized communities are split into chunks
/// of comm_size.
Partition read_partition(std::istream& in, std::size_t comm_size);
Partition load_partition(const std::filesystem::path& path, std::size_t comm_size);

/// Relabels edge (d, s) to (perm[d], perm[s]).
Graph apply_reorder(const Graph& g, const Partition& p);

/// Row permutation of features: out[perm[v]] = x[v].
FeatureMatrix permute_rows(const FeatureMatrix& x, const Partition& p);
/// Inverse of permute_rows.
FeatureMatrix unpermute_rows(const FeatureMatrix& x, const Partition& p);

}  // namespace adaptgear
