#pragma once

// Core graph types and the three physical adjacency formats (CSR, COO and
// per-community dense diagonal blocks).
//
// Convention: an edge is stored as (dst, src). Row index = destination,
// column index = source, so aggregation at vertex v reduces over row v.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace adaptgear {

using VertexId = std::uint32_t;
using Scalar = float;

struct Edge {
  VertexId dst = 0;
  VertexId src = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Canonical directed edge set. Edges are sorted by (dst, src) and unique;
/// weights, when present, are parallel to edges.
class Graph {
 public:
  Graph() = default;

  /// Builds a canonical graph. Duplicate (dst, src) pairs are merged; when
  /// weights are given the merged weight is the sum. Throws on out-of-range
  /// ids or a weight/edge length mismatch.
  static Graph from_edges(std::size_t num_vertices, std::vector<Edge> edges,
                          std::optional<std::vector<Scalar>> weights = std::nullopt);

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  bool weighted() const { return weights_.has_value(); }
  std::span<const Scalar> weights() const;

  /// Weight of edge i; 1.0 for unweighted graphs.
  Scalar weight(std::size_t i) const { return weights_ ? (*weights_)[i] : Scalar{1}; }

  /// In-degree (number of incoming edges) per vertex.
  std::vector<std::uint32_t> in_degrees() const;

  /// Edge-reversed graph: (dst, src) -> (src, dst), weights carried over.
  Graph transposed() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::optional<std::vector<Scalar>> weights_;
};

struct CooMatrix {
  std::size_t num_vertices = 0;
  std::vector<VertexId> row;  // dst
  std::vector<VertexId> col;  // src
  std::vector<Scalar> val;

  std::size_t num_edges() const { return row.size(); }
  friend bool operator==(const CooMatrix&, const CooMatrix&) = default;
};

struct CsrMatrix {
  std::size_t num_vertices = 0;
  std::vector<std::uint32_t> row_ptr;
  std::vector<VertexId> col_idx;
  std::vector<Scalar> val;

  std::size_t num_edges() const { return col_idx.size(); }
  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

/// Dense B x B adjacency blocks on the diagonal, one per community that owns
/// at least one intra edge. Block rows/cols past num_vertices (ragged last
/// community) are zero.
struct DenseBlockSet {
  std::size_t num_vertices = 0;
  std::size_t block_size = 0;
  std::vector<std::uint32_t> community_ids;
  /// Row-major B*B values per stored community, concatenated.
  std::vector<Scalar> values;
  /// 1 if the block row has a nonzero, B entries per stored community.
  std::vector<std::uint8_t> row_touched;

  std::size_t num_blocks() const { return community_ids.size(); }
  std::span<const Scalar> block(std::size_t i) const {
    return {values.data() + i * block_size * block_size, block_size * block_size};
  }
  std::size_t nonzero_count() const;
};

/// Row-major num_vertices x dim matrix of vertex features.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t num_vertices, std::size_t dim, Scalar fill = 0)
      : num_vertices_(num_vertices), dim_(dim), data_(num_vertices * dim, fill) {}
  FeatureMatrix(std::size_t num_vertices, std::size_t dim, std::vector<Scalar> data);

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t dim() const { return dim_; }

  /// Reshapes to num_vertices x dim, reusing the existing allocation when it
  /// is large enough. Contents are unspecified afterwards.
  void reshape(std::size_t num_vertices, std::size_t dim) {
    num_vertices_ = num_vertices;
    dim_ = dim;
    data_.resize(num_vertices * dim);
  }

  std::span<Scalar> row(std::size_t v) { return {data_.data() + v * dim_, dim_}; }
  std::span<const Scalar> row(std::size_t v) const { return {data_.data() + v * dim_, dim_}; }
  Scalar& at(std::size_t v, std::size_t f) { return data_[v * dim_ + f]; }
  Scalar at(std::size_t v, std::size_t f) const { return data_[v * dim_ + f]; }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  std::span<const Scalar> values() const { return data_; }

  /// Throws if any entry is NaN or infinite.
  void check_finite() const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t num_vertices_ = 0;
  std::size_t dim_ = 0;
  std::vector<Scalar> data_;
};

CsrMatrix to_csr(const Graph& g);
CooMatrix to_coo(const Graph& g);
CooMatrix csr_to_coo(const CsrMatrix& a);

/// Packs an intra-community graph into dense diagonal blocks. Throws if any
/// edge crosses block boundaries.
DenseBlockSet to_dense_blocks(const Graph& g, std::size_t block_size);

}  // namespace adaptgear
