#pragma once

// Shared helpers for the unit and acceptance suites: random test inputs and
// brute-force oracles that never touch the library's kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <random>
#include <vector>

#include "adaptgear/decompose.hpp"
#include "adaptgear/generators.hpp"
#include "adaptgear/graph.hpp"
#include "adaptgear/kernels.hpp"
#include "adaptgear/layers.hpp"
#include "adaptgear/reorder.hpp"

namespace testing {

using namespace adaptgear;

using DenseMatrix = std::vector<double>;  // row-major

/// Random graph with log-uniform density, optionally weighted. Duplicate
/// draws collapse, so the edge count is approximate.
inline Graph random_graph(std::mt19937_64& rng, std::size_t max_vertices, bool allow_weights = true) {
  std::uniform_int_distribution<std::size_t> nv(1, max_vertices);
  const std::size_t n = nv(rng);
  const double density = std::exp(std::uniform_real_distribution<double>(std::log(1e-3), 0.0)(rng));
  const auto target = static_cast<std::size_t>(density * static_cast<double>(n) * static_cast<double>(n));
  const bool weighted = allow_weights && (rng() & 1);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  std::uniform_real_distribution<float> wdist(0.25f, 2.0f);
  std::vector<Edge> edges;
  std::vector<Scalar> weights;
  for (std::size_t i = 0; i < target; ++i) {
    edges.push_back({pick(rng), pick(rng)});
    if (weighted) weights.push_back(wdist(rng));
  }
  if (!weighted) return Graph::from_edges(n, std::move(edges));
  return Graph::from_edges(n, std::move(edges), std::move(weights));
}

inline FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  FeatureMatrix x(n, dim);
  for (std::size_t i = 0; i < n * dim; ++i) x.data()[i] = d(rng);
  return x;
}

/// Uniformly random relabelling packaged as a Partition.
inline Partition random_partition(std::mt19937_64& rng, std::size_t n, std::size_t comm_size) {
  Partition p;
  p.num_vertices = n;
  p.comm_size = comm_size;
  p.permutation.resize(n);
  std::iota(p.permutation.begin(), p.permutation.end(), VertexId{0});
  std::shuffle(p.permutation.begin(), p.permutation.end(), rng);
  p.community_of.resize(n);
  for (std::size_t v = 0; v < n; ++v) p.community_of[v] = static_cast<std::uint32_t>(p.permutation[v] / comm_size);
  return p;
}

/// Edge-list oracle in double: sum/mean are weighted, max ignores weights,
/// vertices with no in-edges produce 0.
inline DenseMatrix oracle_aggregate(const Graph& g, const FeatureMatrix& x, AggregateOp op) {
  const std::size_t n = g.num_vertices();
  const std::size_t dim = x.dim();
  DenseMatrix out(n * dim, 0.0);
  std::vector<std::size_t> count(n, 0);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge e = edges[i];
    const double w = g.weight(i);
    for (std::size_t f = 0; f < dim; ++f) {
      const double v = x.at(e.src, f);
      double& cell = out[e.dst * dim + f];
      if (op == AggregateOp::kMax) {
        cell = count[e.dst] == 0 ? v : std::max(cell, v);
      } else {
        cell += w * v;
      }
    }
    ++count[e.dst];
  }
  if (op == AggregateOp::kMean) {
    for (std::size_t v = 0; v < n; ++v) {
      if (count[v] == 0) continue;
      for (std::size_t f = 0; f < dim; ++f) out[v * dim + f] /= static_cast<double>(count[v]);
    }
  }
  return out;
}

/// Largest |a - b| / max(1, |b|).
inline double rel_error(const FeatureMatrix& a, const DenseMatrix& b) {
  double worst = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  return worst;
}

inline double abs_error(const FeatureMatrix& a, const DenseMatrix& b) {
  double worst = 0;
  for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b[i]));
  return worst;
}

/// Exact comparison against float-cast oracle values (used for max).
inline bool exactly_equal(const FeatureMatrix& a, const DenseMatrix& b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (a.data()[i] != static_cast<Scalar>(b[i])) return false;
  }
  return true;
}

inline double max_abs_difference(const FeatureMatrix& a, const FeatureMatrix& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.num_vertices() * a.dim(); ++i) {
    worst = std::max(worst, static_cast<double>(std::abs(a.data()[i] - b.data()[i])));
  }
  return worst;
}

inline bool bitwise_equal(const FeatureMatrix& a, const FeatureMatrix& b) {
  return a.num_vertices() == b.num_vertices() && a.dim() == b.dim() &&
         std::memcmp(a.data(), b.data(), a.num_vertices() * a.dim() * sizeof(Scalar)) == 0;
}

/// out = x W in double.
inline DenseMatrix oracle_linear(const DenseMatrix& x, std::size_t n, const LayerParams& p) {
  DenseMatrix out(n * p.out_dim, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t i = 0; i < p.in_dim; ++i)
      for (std::size_t j = 0; j < p.out_dim; ++j)
        out[v * p.out_dim + j] += x[v * p.in_dim + i] * static_cast<double>(p.weight[i * p.out_dim + j]);
  return out;
}

/// D^-1/2 (A + I) D^-1/2 X W with a dense V x V matrix, degrees of A + I.
inline DenseMatrix oracle_gcn(const Graph& g, const FeatureMatrix& x, const LayerParams& p) {
  const std::size_t n = g.num_vertices();
  DenseMatrix a(n * n, 0.0);
  for (const Edge& e : g.edges()) a[e.dst * n + e.src] = 1.0;
  for (std::size_t v = 0; v < n; ++v) a[v * n + v] = 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) deg[r] += a[r * n + c];
  DenseMatrix ax(n * x.dim(), 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (a[r * n + c] == 0.0) continue;
      const double w = 1.0 / std::sqrt(deg[r] * deg[c]);
      for (std::size_t f = 0; f < x.dim(); ++f) ax[r * x.dim() + f] += w * x.at(c, f);
    }
  return oracle_linear(ax, n, p);
}

/// ((1 + eps) X + A X) W.
inline DenseMatrix oracle_gin(const Graph& g, const FeatureMatrix& x, const LayerParams& p) {
  const std::size_t n = g.num_vertices();
  DenseMatrix h = oracle_aggregate(g, x, AggregateOp::kSum);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] += (1.0 + p.gin_eps) * x.data()[i];
  return oracle_linear(h, n, p);
}

}  // namespace testing
