#pragma once

// Density-specialized aggregation kernels.
//
// Every kernel computes, for each destination row r, a reduction over the
// source neighbors s of r: weighted sum (sum and mean) or unweighted
// elementwise max. Kernels return a PartialResult; mean division by the
// full-graph degree happens in combine()/finalize(), so partials from the
// intra and inter subgraphs can be merged exactly.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adaptgear/graph.hpp"

namespace adaptgear {

enum class AggregateOp { kSum, kMean, kMax };

enum class KernelKind {
  kCsrInter,         // row-parallel gather over CSR
  kCsrIntraBlocked,  // per-community gather with staged feature tiles
  kCooAtomic,        // edge-parallel scatter with atomic updates
  kDenseBlock,       // batched GEMM over dense diagonal blocks
  kDenseReference,   // brute-force oracle
};

std::string_view to_string(AggregateOp op);
std::string_view to_string(KernelKind kind);
AggregateOp parse_aggregate_op(std::string_view name);
KernelKind parse_kernel_kind(std::string_view name);

/// Only kernels that accept intra subgraphs (diagonal-block precondition).
bool requires_intra(KernelKind kind);
/// Whether the kernel supports an op (dense blocks cannot express max).
bool supports(KernelKind kind, AggregateOp op);

struct PartialResult {
  FeatureMatrix values;
  std::vector<std::uint8_t> touched;
  AggregateOp op = AggregateOp::kSum;
};

/// Default scratch budget for staged feature tiles.
inline constexpr std::size_t kDefaultTileBudgetBytes = 48 * 1024;
inline constexpr std::size_t kUnboundedTileBudget = SIZE_MAX;

/// Feature-dimension tile width used by the blocked intra kernel.
std::size_t intra_tile_width(std::size_t block_size, std::size_t feat_dim,
                             std::size_t tile_budget_bytes);

// Each kernel has an in-place form writing into `out`, whose buffers are
// reused across calls, and a value-returning convenience form.

void aggregate_csr_inter(const CsrMatrix& a, const FeatureMatrix& x, AggregateOp op, PartialResult& out);
PartialResult aggregate_csr_inter(const CsrMatrix& a, const FeatureMatrix& x, AggregateOp op);

/// One community at a time: the community's source-feature slab is staged
/// into a contiguous scratch buffer of at most tile_budget_bytes, tiling over
/// the feature dimension when it does not fit. Summation order per row is
/// ascending source id, identical to aggregate_csr_inter.
void aggregate_csr_intra_blocked(const CsrMatrix& a, const FeatureMatrix& x, AggregateOp op,
                                 std::size_t block_size, std::size_t tile_budget_bytes, PartialResult& out);
PartialResult aggregate_csr_intra_blocked(const CsrMatrix& a, const FeatureMatrix& x,
                                          AggregateOp op, std::size_t block_size,
                                          std::size_t tile_budget_bytes = kDefaultTileBudgetBytes);

/// Edge-parallel accumulation with atomic read-modify-write on output cells.
/// Order of accumulation is nondeterministic under multiple threads. Max is
/// supported through a compare-exchange loop.
void aggregate_coo_atomic(const CooMatrix& a, const FeatureMatrix& x, AggregateOp op, PartialResult& out);
PartialResult aggregate_coo_atomic(const CooMatrix& a, const FeatureMatrix& x, AggregateOp op);

/// out[cB:(c+1)B] += Block_c * x[cB:(c+1)B] for every stored community.
/// Throws for max.
void aggregate_dense_block(const DenseBlockSet& d, const FeatureMatrix& x, AggregateOp op, PartialResult& out);
PartialResult aggregate_dense_block(const DenseBlockSet& d, const FeatureMatrix& x, AggregateOp op);

/// Merges `inter` into `intra` in place. Mean divides by
/// max(full_in_degree, 1); vertices untouched on both sides yield 0.
void combine_into(PartialResult& intra, const PartialResult& inter, AggregateOp op,
                  std::span<const std::uint32_t> full_in_degree = {});
FeatureMatrix combine(PartialResult intra, const PartialResult& inter, AggregateOp op,
                      std::span<const std::uint32_t> full_in_degree = {});

/// Applies the mean division of a single full-graph partial in place.
void finalize_into(PartialResult& partial, std::span<const std::uint32_t> full_in_degree = {});
FeatureMatrix finalize(PartialResult partial, std::span<const std::uint32_t> full_in_degree = {});

inline constexpr std::size_t kDenseReferenceCap = 4096;

/// Literal loop over the dense V x V adjacency, accumulating in double.
FeatureMatrix aggregate_dense_reference(const Graph& g, const FeatureMatrix& x, AggregateOp op,
                                        std::size_t vertex_cap = kDenseReferenceCap);

/// Gradient of sum-aggregation: dX = A^T dY, given the transposed graph.
FeatureMatrix backward_sum(const Graph& transposed, const FeatureMatrix& dy);

}  // namespace adaptgear
