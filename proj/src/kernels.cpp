#include "adaptgear/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "adaptgear/error.hpp"

namespace adaptgear {
namespace {

void check_dims(std::size_t matrix_vertices, const FeatureMatrix& x) {
  if (matrix_vertices != x.num_vertices()) {
    throw Error("feature matrix has " + std::to_string(x.num_vertices()) + " rows but graph has " +
                std::to_string(matrix_vertices) + " vertices");
  }
}

// Shapes `out` for n x dim without initializing values; touched is cleared.
void prepare(PartialResult& out, std::size_t n, std::size_t dim, AggregateOp op) {
  out.values.reshape(n, dim);
  out.touched.assign(n, 0);
  out.op = op;
}

void zero_fill(PartialResult& out) {
  std::fill(out.values.data(), out.values.data() + out.values.num_vertices() * out.values.dim(), Scalar{0});
}

// Reduces the neighbor list [begin, end) of one row into out (length = width),
// reading source features from `src_row(s)`. Sums accumulate in double in
// ascending column order.
template <typename SourceRow>
void reduce_row(const CsrMatrix& a, std::uint32_t begin, std::uint32_t end, AggregateOp op,
                std::size_t width, SourceRow&& src_row, Scalar* out, double* acc) {
  if (op == AggregateOp::kMax) {
    const Scalar* first = src_row(a.col_idx[begin]);
    std::copy(first, first + width, out);
    for (std::uint32_t k = begin + 1; k < end; ++k) {
      const Scalar* xs = src_row(a.col_idx[k]);
      for (std::size_t f = 0; f < width; ++f) out[f] = std::max(out[f], xs[f]);
    }
    return;
  }
  // Products of two floats are exact in double, so only the additions round.
  std::fill(acc, acc + width, 0.0);
  for (std::uint32_t k = begin; k < end; ++k) {
    const double w = a.val[k];
    const Scalar* xs = src_row(a.col_idx[k]);
    for (std::size_t f = 0; f < width; ++f) acc[f] += w * xs[f];
  }
  for (std::size_t f = 0; f < width; ++f) out[f] = static_cast<Scalar>(acc[f]);
}

using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using StridedBlock = Eigen::Map<const RowMajor, 0, Eigen::OuterStride<>>;

constexpr Eigen::Index kDenseSlice = 32;

// Float GEMM over slices of the inner dimension, each slice's partial product
// added into a double accumulator. Rounding only compounds within a slice,
// which keeps long rows accurate at close to float GEMM speed. A single slice
// gives the same bits as a plain float product.
void accumulate_sliced(const StridedBlock& block, const Eigen::Map<const RowMajor>& in,
                       Eigen::Map<RowMajor>& result) {
  thread_local RowMajor slice;
  thread_local Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> acc;
  const Eigen::Index inner = block.cols();
  acc.setZero(result.rows(), result.cols());
  for (Eigen::Index k0 = 0; k0 < inner; k0 += kDenseSlice) {
    const Eigen::Index k = std::min<Eigen::Index>(kDenseSlice, inner - k0);
    slice.noalias() = block.middleCols(k0, k) * in.middleRows(k0, k);
    acc += slice.cast<double>();
  }
  result = acc.cast<Scalar>();
}

}  // namespace

std::string_view to_string(AggregateOp op) {
  switch (op) {
    case AggregateOp::kSum: return "sum";
    case AggregateOp::kMean: return "mean";
    case AggregateOp::kMax: return "max";
  }
  return "?";
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kCsrInter: return "csr_inter";
    case KernelKind::kCsrIntraBlocked: return "csr_intra_blocked";
    case KernelKind::kCooAtomic: return "coo_atomic";
    case KernelKind::kDenseBlock: return "dense_block";
    case KernelKind::kDenseReference: return "dense_reference";
  }
  return "?";
}

AggregateOp parse_aggregate_op(std::string_view name) {
  for (AggregateOp op : {AggregateOp::kSum, AggregateOp::kMean, AggregateOp::kMax}) {
    if (to_string(op) == name) return op;
  }
  throw Error("unknown aggregate op '" + std::string(name) + "'");
}

KernelKind parse_kernel_kind(std::string_view name) {
  for (KernelKind k : {KernelKind::kCsrInter, KernelKind::kCsrIntraBlocked, KernelKind::kCooAtomic,
                       KernelKind::kDenseBlock, KernelKind::kDenseReference}) {
    if (to_string(k) == name) return k;
  }
  throw Error("unknown kernel '" + std::string(name) + "'");
}

bool requires_intra(KernelKind kind) {
  return kind == KernelKind::kCsrIntraBlocked || kind == KernelKind::kDenseBlock;
}

bool supports(KernelKind kind, AggregateOp op) {
  return !(kind == KernelKind::kDenseBlock && op == AggregateOp::kMax);
}

std::size_t intra_tile_width(std::size_t block_size, std::size_t feat_dim,
                             std::size_t tile_budget_bytes) {
  const std::size_t row_bytes = block_size * sizeof(Scalar);
  if (feat_dim == 0) return 0;
  if (tile_budget_bytes == kUnboundedTileBudget || feat_dim * row_bytes <= tile_budget_bytes) {
    return feat_dim;
  }
  return std::clamp<std::size_t>(tile_budget_bytes / row_bytes, 1, feat_dim);
}

void aggregate_csr_inter(const CsrMatrix& a, const FeatureMatrix& x, AggregateOp op, PartialResult& out) {
  check_dims(a.num_vertices, x);
  const std::size_t n = a.num_vertices;
  const std::size_t dim = x.dim();
  prepare(out, n, dim, op);
  const auto src_row = [&](VertexId s) { return x.data() + static_cast<std::size_t>(s) * dim; };

#pragma omp parallel
  {
    std::vector<double> acc(dim);
#pragma omp for schedule(dynamic, 64)
    for (std::size_t r = 0; r < n; ++r) {
      const std::uint32_t begin = a.row_ptr[r];
      const std::uint32_t end = a.row_ptr[r + 1];
      Scalar* row = out.values.data() + r * dim;
      if (begin == end) {
        std::fill(row, row + dim, Scalar{0});
        continue;
      }
      out.touched[r] = 1;
      reduce_row(a, begin, end, op, dim, src_row, row, acc.data());
    }
  }
}

PartialResult aggregate_csr_inter(const CsrMatrix& a, const FeatureMatrix& x, AggregateOp op) {
  PartialResult out;
  aggregate_csr_inter(a, x, op, out);
  return out;
}

void aggregate_csr_intra_blocked(const CsrMatrix& a, const FeatureMatrix& x, AggregateOp op,
                                 std::size_t block_size, std::size_t tile_budget_bytes, PartialResult& out) {
  check_dims(a.num_vertices, x);
  if (block_size == 0) throw Error("block size must be positive");
  const std::size_t n = a.num_vertices;
  const std::size_t dim = x.dim();
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t block = r / block_size;
    for (std::uint32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      if (a.col_idx[k] / block_size != block) {
        throw Error("edge (" + std::to_string(r) + ", " + std::to_string(a.col_idx[k]) +
                    ") is outside diagonal block of size " + std::to_string(block_size));
      }
    }
  }

  prepare(out, n, dim, op);
  const std::size_t tile = intra_tile_width(block_size, dim, tile_budget_bytes);
  const std::size_t communities = (n + block_size - 1) / block_size;

#pragma omp parallel
  {
    std::vector<Scalar> scratch(block_size * tile);
    std::vector<double> acc(tile);
#pragma omp for schedule(dynamic, 4)
    for (std::size_t c = 0; c < communities; ++c) {
      const std::size_t lo = c * block_size;
      const std::size_t hi = std::min(n, lo + block_size);
      std::fill(out.values.data() + lo * dim, out.values.data() + hi * dim, Scalar{0});
      if (a.row_ptr[lo] == a.row_ptr[hi]) continue;
      for (std::size_t f0 = 0; f0 < dim; f0 += tile) {
        const std::size_t width = std::min(tile, dim - f0);
        for (std::size_t s = lo; s < hi; ++s) {
          const Scalar* src = x.data() + s * dim + f0;
          std::copy(src, src + width, scratch.data() + (s - lo) * width);
        }
        const auto staged = [&](VertexId s) { return scratch.data() + (s - lo) * width; };
        for (std::size_t r = lo; r < hi; ++r) {
          const std::uint32_t begin = a.row_ptr[r];
          const std::uint32_t end = a.row_ptr[r + 1];
          if (begin == end) continue;
          out.touched[r] = 1;
          reduce_row(a, begin, end, op, width, staged, out.values.data() + r * dim + f0, acc.data());
        }
      }
    }
  }
}

PartialResult aggregate_csr_intra_blocked(const CsrMatrix& a, const FeatureMatrix& x, AggregateOp op,
                                          std::size_t block_size, std::size_t tile_budget_bytes) {
  PartialResult out;
  aggregate_csr_intra_blocked(a, x, op, block_size, tile_budget_bytes, out);
  return out;
}

void aggregate_coo_atomic(const CooMatrix& a, const FeatureMatrix& x, AggregateOp op, PartialResult& out) {
  check_dims(a.num_vertices, x);
  const std::size_t n = a.num_vertices;
  const std::size_t dim = x.dim();
  const std::size_t num_edges = a.num_edges();
  prepare(out, n, dim, op);
  Scalar* y = out.values.data();
  const Scalar* xs = x.data();
  std::fill(y, y + n * dim, op == AggregateOp::kMax ? -std::numeric_limits<Scalar>::infinity() : Scalar{0});

#pragma omp parallel for schedule(static)
  for (std::size_t e = 0; e < num_edges; ++e) {
    const std::size_t dst = a.row[e];
    const std::size_t src = a.col[e];
    std::atomic_ref<std::uint8_t>(out.touched[dst]).store(1, std::memory_order_relaxed);
    Scalar* out_row = y + dst * dim;
    const Scalar* in_row = xs + src * dim;
    if (op == AggregateOp::kMax) {
      for (std::size_t f = 0; f < dim; ++f) {
        std::atomic_ref<Scalar> cell(out_row[f]);
        Scalar current = cell.load(std::memory_order_relaxed);
        while (in_row[f] > current &&
               !cell.compare_exchange_weak(current, in_row[f], std::memory_order_relaxed)) {
        }
      }
    } else {
      const Scalar w = a.val[e];
      for (std::size_t f = 0; f < dim; ++f) {
        std::atomic_ref<Scalar>(out_row[f]).fetch_add(w * in_row[f], std::memory_order_relaxed);
      }
    }
  }

  if (op == AggregateOp::kMax) {
    for (std::size_t v = 0; v < n; ++v) {
      if (!out.touched[v]) std::fill(y + v * dim, y + (v + 1) * dim, Scalar{0});
    }
  }
}

PartialResult aggregate_coo_atomic(const CooMatrix& a, const FeatureMatrix& x, AggregateOp op) {
  PartialResult out;
  aggregate_coo_atomic(a, x, op, out);
  return out;
}

void aggregate_dense_block(const DenseBlockSet& d, const FeatureMatrix& x, AggregateOp op, PartialResult& out) {
  check_dims(d.num_vertices, x);
  if (op == AggregateOp::kMax) throw Error("dense_block kernel does not support max aggregation");
  const std::size_t n = d.num_vertices;
  const std::size_t dim = x.dim();
  const std::size_t b = d.block_size;
  prepare(out, n, dim, op);
  zero_fill(out);
  const auto blocks = static_cast<std::ptrdiff_t>(d.num_blocks());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < blocks; ++i) {
    const std::size_t lo = static_cast<std::size_t>(d.community_ids[i]) * b;
    const auto rows = static_cast<Eigen::Index>(std::min(b, n - lo));
    const auto cols = static_cast<Eigen::Index>(dim);
    StridedBlock block(d.block(i).data(), rows, rows, Eigen::OuterStride<>(static_cast<Eigen::Index>(b)));
    Eigen::Map<const RowMajor> in(x.data() + lo * dim, rows, cols);
    Eigen::Map<RowMajor> result(out.values.data() + lo * dim, rows, cols);
    if (rows <= kDenseSlice) {
      result.noalias() = block * in;
    } else {
      accumulate_sliced(block, in, result);
    }
    for (Eigen::Index r = 0; r < rows; ++r) out.touched[lo + r] = d.row_touched[i * b + r];
  }
}

PartialResult aggregate_dense_block(const DenseBlockSet& d, const FeatureMatrix& x, AggregateOp op) {
  PartialResult out;
  aggregate_dense_block(d, x, op, out);
  return out;
}

void combine_into(PartialResult& intra, const PartialResult& inter, AggregateOp op,
                  std::span<const std::uint32_t> full_in_degree) {
  if (intra.op != op || inter.op != op) throw Error("partial results were computed for a different op");
  const std::size_t n = intra.values.num_vertices();
  const std::size_t dim = intra.values.dim();
  if (inter.values.num_vertices() != n || inter.values.dim() != dim) {
    throw Error("partial results have mismatched shapes");
  }
  if (op == AggregateOp::kMean && full_in_degree.size() != n) {
    throw Error("mean aggregation requires the full-graph in-degree vector");
  }
  Scalar* y = intra.values.data();
  const Scalar* z = inter.values.data();

#pragma omp parallel for schedule(static)
  for (std::size_t v = 0; v < n; ++v) {
    Scalar* row = y + v * dim;
    const Scalar* other = z + v * dim;
    switch (op) {
      case AggregateOp::kSum:
        for (std::size_t f = 0; f < dim; ++f) row[f] += other[f];
        break;
      case AggregateOp::kMean: {
        const Scalar inv = Scalar{1} / static_cast<Scalar>(std::max<std::uint32_t>(full_in_degree[v], 1));
        for (std::size_t f = 0; f < dim; ++f) row[f] = (row[f] + other[f]) * inv;
        break;
      }
      case AggregateOp::kMax:
        if (!inter.touched[v]) break;
        if (!intra.touched[v]) {
          std::copy(other, other + dim, row);
        } else {
          for (std::size_t f = 0; f < dim; ++f) row[f] = std::max(row[f], other[f]);
        }
        break;
    }
    intra.touched[v] |= inter.touched[v];
  }
}

FeatureMatrix combine(PartialResult intra, const PartialResult& inter, AggregateOp op,
                      std::span<const std::uint32_t> full_in_degree) {
  combine_into(intra, inter, op, full_in_degree);
  return std::move(intra.values);
}

void finalize_into(PartialResult& partial, std::span<const std::uint32_t> full_in_degree) {
  if (partial.op != AggregateOp::kMean) return;
  const std::size_t n = partial.values.num_vertices();
  if (full_in_degree.size() != n) throw Error("mean aggregation requires the full-graph in-degree vector");
  for (std::size_t v = 0; v < n; ++v) {
    const Scalar inv = Scalar{1} / static_cast<Scalar>(std::max<std::uint32_t>(full_in_degree[v], 1));
    for (Scalar& value : partial.values.row(v)) value *= inv;
  }
}

FeatureMatrix finalize(PartialResult partial, std::span<const std::uint32_t> full_in_degree) {
  finalize_into(partial, full_in_degree);
  return std::move(partial.values);
}

FeatureMatrix aggregate_dense_reference(const Graph& g, const FeatureMatrix& x, AggregateOp op,
                                        std::size_t vertex_cap) {
  const std::size_t n = g.num_vertices();
  if (n > vertex_cap) {
    throw Error("dense reference capped at " + std::to_string(vertex_cap) + " vertices, graph has " +
                std::to_string(n));
  }
  check_dims(n, x);
  const std::size_t dim = x.dim();
  std::vector<Scalar> weight(n * n, 0);
  std::vector<std::uint8_t> present(n * n, 0);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    weight[edges[i].dst * n + edges[i].src] = g.weight(i);
    present[edges[i].dst * n + edges[i].src] = 1;
  }

  FeatureMatrix out(n, dim);
  std::vector<double> acc(dim);
  for (std::size_t d = 0; d < n; ++d) {
    std::size_t count = 0;
    std::fill(acc.begin(), acc.end(), op == AggregateOp::kMax ? -std::numeric_limits<double>::infinity() : 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (!present[d * n + s]) continue;
      ++count;
      for (std::size_t f = 0; f < dim; ++f) {
        if (op == AggregateOp::kMax) {
          acc[f] = std::max(acc[f], static_cast<double>(x.at(s, f)));
        } else {
          acc[f] += static_cast<double>(weight[d * n + s]) * static_cast<double>(x.at(s, f));
        }
      }
    }
    if (count == 0) continue;
    for (std::size_t f = 0; f < dim; ++f) {
      const double value = op == AggregateOp::kMean ? acc[f] / static_cast<double>(count) : acc[f];
      out.at(d, f) = static_cast<Scalar>(value);
    }
  }
  return out;
}

FeatureMatrix backward_sum(const Graph& transposed, const FeatureMatrix& dy) {
  return finalize(aggregate_csr_inter(to_csr(transposed), dy, AggregateOp::kSum));
}

}  // namespace adaptgear
