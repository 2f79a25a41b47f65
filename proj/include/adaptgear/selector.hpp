#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "adaptgear/decompose.hpp"
#include "adaptgear/kernels.hpp"

namespace adaptgear {

enum class SubgraphRole { kIntra, kInter };

std::string_view to_string(SubgraphRole role);

enum class SelectorPhase { kProfiling, kLocked };

/// Feedback-driven kernel choice per subgraph role. Candidates are profiled
/// round-robin during the first iterations; once every candidate has
/// profile_iters_per_candidate measurements the median-fastest one per role
/// is locked in for the rest of the run.
struct SelectorState {
  std::vector<KernelKind> candidates_intra{KernelKind::kCsrIntraBlocked, KernelKind::kDenseBlock};
  std::vector<KernelKind> candidates_inter{KernelKind::kCsrInter, KernelKind::kCooAtomic};
  std::size_t profile_iters_per_candidate = 3;
  std::map<std::pair<SubgraphRole, KernelKind>, std::vector<double>> timings;  // microseconds
  SelectorPhase phase = SelectorPhase::kProfiling;
  std::optional<KernelKind> choice_intra;
  std::optional<KernelKind> choice_inter;

  const std::vector<KernelKind>& candidates(SubgraphRole role) const {
    return role == SubgraphRole::kIntra ? candidates_intra : candidates_inter;
  }
  std::size_t measurements(SubgraphRole role, KernelKind kind) const;
  /// profile_iters_per_candidate * max(|intra|, |inter|).
  std::size_t profiling_iterations() const;
};

/// Validates candidate lists (non-empty, role-compatible, op-compatible).
/// Dense blocks cannot express max, so they are dropped from the intra
/// candidates when op is max.
SelectorState make_selector(std::vector<KernelKind> intra, std::vector<KernelKind> inter,
                            std::size_t profile_iters_per_candidate, AggregateOp op);
SelectorState make_default_selector(AggregateOp op, std::size_t profile_iters_per_candidate = 3);

struct IterationPlan {
  std::size_t iter_index = 0;
  KernelKind kernel_intra = KernelKind::kCsrIntraBlocked;
  KernelKind kernel_inter = KernelKind::kCsrInter;
  bool is_profiling = false;
};

IterationPlan plan_iteration(const SelectorState& s, std::size_t iter_index);

/// Appends a measurement and locks the state once all candidates are fully
/// measured. Throws when already locked or `kind` is not a candidate.
SelectorState record_timing(SelectorState s, SubgraphRole role, KernelKind kind, double elapsed_us);

double median(std::vector<double> values);

/// All physical formats of both subgraphs, built once before the loop.
struct PreparedSubgraphs {
  std::size_t num_vertices = 0;
  std::size_t block_size = 0;
  CsrMatrix intra_csr;
  DenseBlockSet intra_dense;
  CsrMatrix inter_csr;
  CooMatrix inter_coo;
  std::vector<std::uint32_t> full_in_degree;
};

PreparedSubgraphs prepare_subgraphs(const DecomposedGraph& d);

struct KernelOptions {
  std::size_t tile_budget_bytes = kDefaultTileBudgetBytes;
};

void run_kernel(const PreparedSubgraphs& p, SubgraphRole role, KernelKind kind, const FeatureMatrix& x,
                AggregateOp op, PartialResult& out, const KernelOptions& options = {});
PartialResult run_kernel(const PreparedSubgraphs& p, SubgraphRole role, KernelKind kind,
                         const FeatureMatrix& x, AggregateOp op, const KernelOptions& options = {});

struct IterationRecord {
  std::size_t i = 0;
  KernelKind kernel_intra = KernelKind::kCsrIntraBlocked;
  KernelKind kernel_inter = KernelKind::kCsrInter;
  bool profiling = false;
  double intra_us = 0;
  double inter_us = 0;
  double total_us = 0;  // both kernels plus combine
};

/// One aggregation step over a decomposed graph driven by a selector.
class AdaptiveAggregator {
 public:
  AdaptiveAggregator(const DecomposedGraph& d, SelectorState state, AggregateOp op,
                     KernelOptions options = {});
  AdaptiveAggregator(PreparedSubgraphs prepared, SelectorState state, AggregateOp op,
                     KernelOptions options = {});

  /// The returned reference stays valid until the next step.
  const FeatureMatrix& step(const FeatureMatrix& x, IterationRecord* record = nullptr);

  const SelectorState& state() const { return state_; }
  const PreparedSubgraphs& prepared() const { return prepared_; }
  std::size_t iterations() const { return iter_; }

 private:
  PreparedSubgraphs prepared_;
  SelectorState state_;
  AggregateOp op_;
  KernelOptions options_;
  PartialResult intra_;
  PartialResult inter_;
  std::size_t iter_ = 0;
};

struct TrainingLoopResult {
  FeatureMatrix result;
  SelectorState state;
  std::vector<IterationRecord> trace;
};

/// Runs `iters` aggregation rounds over the static topology. Requires
/// iters >= the selector's profiling budget.
TrainingLoopResult run_training_loop(const DecomposedGraph& d, const FeatureMatrix& x, AggregateOp op,
                                     std::size_t iters, SelectorState s, KernelOptions options = {});

}  // namespace adaptgear
