#include "adaptgear/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adaptgear/error.hpp"

namespace adaptgear {

Graph Graph::from_edges(std::size_t num_vertices, std::vector<Edge> edges,
                        std::optional<std::vector<Scalar>> weights) {
  if (num_vertices > static_cast<std::size_t>(INT32_MAX)) {
    throw Error("vertex count exceeds 32-bit id range");
  }
  if (weights && weights->size() != edges.size()) {
    throw Error("weight count " + std::to_string(weights->size()) +
                " does not match edge count " + std::to_string(edges.size()));
  }
  for (const Edge& e : edges) {
    if (e.dst >= num_vertices || e.src >= num_vertices) {
      throw Error("edge (" + std::to_string(e.dst) + ", " + std::to_string(e.src) +
                  ") out of range for " + std::to_string(num_vertices) + " vertices");
    }
  }

  Graph g;
  g.num_vertices_ = num_vertices;
  if (!weights) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges_ = std::move(edges);
    return g;
  }

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  std::vector<Edge> out_edges;
  std::vector<Scalar> out_weights;
  out_edges.reserve(edges.size());
  out_weights.reserve(edges.size());
  for (std::size_t i : order) {
    if (!out_edges.empty() && out_edges.back() == edges[i]) {
      out_weights.back() += (*weights)[i];
    } else {
      out_edges.push_back(edges[i]);
      out_weights.push_back((*weights)[i]);
    }
  }
  g.edges_ = std::move(out_edges);
  g.weights_ = std::move(out_weights);
  return g;
}

std::span<const Scalar> Graph::weights() const {
  if (!weights_) return {};
  return *weights_;
}

std::vector<std::uint32_t> Graph::in_degrees() const {
  std::vector<std::uint32_t> deg(num_vertices_, 0);
  for (const Edge& e : edges_) ++deg[e.dst];
  return deg;
}

Graph Graph::transposed() const {
  std::vector<Edge> rev;
  rev.reserve(edges_.size());
  for (const Edge& e : edges_) rev.push_back({e.src, e.dst});
  return from_edges(num_vertices_, std::move(rev), weights_);
}

std::size_t DenseBlockSet::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](Scalar v) { return v != Scalar{0}; }));
}

FeatureMatrix::FeatureMatrix(std::size_t num_vertices, std::size_t dim, std::vector<Scalar> data)
    : num_vertices_(num_vertices), dim_(dim), data_(std::move(data)) {
  if (data_.size() != num_vertices_ * dim_) {
    throw Error("feature data size does not match " + std::to_string(num_vertices_) + " x " +
                std::to_string(dim_));
  }
}

void FeatureMatrix::check_finite() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error("non-finite feature at vertex " + std::to_string(i / std::max<std::size_t>(dim_, 1)));
    }
  }
}

CsrMatrix to_csr(const Graph& g) {
  CsrMatrix a;
  a.num_vertices = g.num_vertices();
  a.row_ptr.assign(g.num_vertices() + 1, 0);
  a.col_idx.reserve(g.num_edges());
  a.val.reserve(g.num_edges());
  const auto edges = g.edges();
  // Canonical order is (dst, src), so rows and their columns come out sorted.
  for (std::size_t i = 0; i < edges.size(); ++i) {
    ++a.row_ptr[edges[i].dst + 1];
    a.col_idx.push_back(edges[i].src);
    a.val.push_back(g.weight(i));
  }
  std::partial_sum(a.row_ptr.begin(), a.row_ptr.end(), a.row_ptr.begin());
  return a;
}

CooMatrix to_coo(const Graph& g) {
  CooMatrix a;
  a.num_vertices = g.num_vertices();
  a.row.reserve(g.num_edges());
  a.col.reserve(g.num_edges());
  a.val.reserve(g.num_edges());
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    a.row.push_back(edges[i].dst);
    a.col.push_back(edges[i].src);
    a.val.push_back(g.weight(i));
  }
  return a;
}

CooMatrix csr_to_coo(const CsrMatrix& a) {
  CooMatrix c;
  c.num_vertices = a.num_vertices;
  c.col = a.col_idx;
  c.val = a.val;
  c.row.reserve(a.num_edges());
  for (std::size_t r = 0; r < a.num_vertices; ++r) {
    for (std::uint32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      c.row.push_back(static_cast<VertexId>(r));
    }
  }
  return c;
}

DenseBlockSet to_dense_blocks(const Graph& g, std::size_t block_size) {
  if (block_size == 0) throw Error("block size must be positive");
  DenseBlockSet d;
  d.num_vertices = g.num_vertices();
  d.block_size = block_size;
  const std::size_t bb = block_size * block_size;
  const auto edges = g.edges();
  std::size_t current = SIZE_MAX;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge e = edges[i];
    const std::size_t c = e.dst / block_size;
    if (c != e.src / block_size) {
      throw Error("edge (" + std::to_string(e.dst) + ", " + std::to_string(e.src) +
                  ") crosses community blocks of size " + std::to_string(block_size));
    }
    // Edges are sorted by dst, so communities arrive in ascending order.
    if (c != current) {
      current = c;
      d.community_ids.push_back(static_cast<std::uint32_t>(c));
      d.values.resize(d.values.size() + bb, Scalar{0});
      d.row_touched.resize(d.row_touched.size() + block_size, 0);
    }
    const std::size_t local_row = e.dst - c * block_size;
    const std::size_t local_col = e.src - c * block_size;
    const std::size_t base = (d.community_ids.size() - 1);
    d.values[base * bb + local_row * block_size + local_col] = g.weight(i);
    d.row_touched[base * block_size + local_row] = 1;
  }
  return d;
}

}  // namespace adaptgear
