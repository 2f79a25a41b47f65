#include "adaptgear/selector.hpp"

#include <algorithm>
#include <string>

#include "adaptgear/error.hpp"

namespace adaptgear {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point start, Clock::time_point stop) {
  return std::chrono::duration<double, std::micro>(stop - start).count();
}

bool allowed(SubgraphRole role, KernelKind kind) {
  if (role == SubgraphRole::kIntra) {
    return kind == KernelKind::kCsrIntraBlocked || kind == KernelKind::kDenseBlock ||
           kind == KernelKind::kCsrInter;
  }
  return kind == KernelKind::kCsrInter || kind == KernelKind::kCooAtomic;
}

KernelKind fastest(const SelectorState& s, SubgraphRole role) {
  const auto& list = s.candidates(role);
  KernelKind best = list.front();
  double best_median = median(s.timings.at({role, best}));
  for (std::size_t i = 1; i < list.size(); ++i) {
    const double m = median(s.timings.at({role, list[i]}));
    if (m < best_median) {
      best = list[i];
      best_median = m;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(SubgraphRole role) {
  return role == SubgraphRole::kIntra ? "intra" : "inter";
}

std::size_t SelectorState::measurements(SubgraphRole role, KernelKind kind) const {
  const auto it = timings.find({role, kind});
  return it == timings.end() ? 0 : it->second.size();
}

std::size_t SelectorState::profiling_iterations() const {
  return profile_iters_per_candidate * std::max(candidates_intra.size(), candidates_inter.size());
}

SelectorState make_selector(std::vector<KernelKind> intra, std::vector<KernelKind> inter,
                            std::size_t profile_iters_per_candidate, AggregateOp op) {
  if (profile_iters_per_candidate == 0) throw Error("profile iterations per candidate must be positive");
  std::erase_if(intra, [op](KernelKind k) { return !supports(k, op); });
  for (auto [role, list] : {std::pair{SubgraphRole::kIntra, &intra}, std::pair{SubgraphRole::kInter, &inter}}) {
    if (list->empty()) throw Error(std::string("no usable ") + std::string(to_string(role)) + " candidates");
    for (KernelKind k : *list) {
      if (!allowed(role, k)) {
        throw Error(std::string(to_string(k)) + " is not a valid " + std::string(to_string(role)) +
                    " candidate");
      }
      if (std::count(list->begin(), list->end(), k) > 1) throw Error("duplicate candidate kernel");
    }
  }
  SelectorState s;
  s.candidates_intra = std::move(intra);
  s.candidates_inter = std::move(inter);
  s.profile_iters_per_candidate = profile_iters_per_candidate;
  return s;
}

SelectorState make_default_selector(AggregateOp op, std::size_t profile_iters_per_candidate) {
  const SelectorState defaults;
  return make_selector(defaults.candidates_intra, defaults.candidates_inter, profile_iters_per_candidate, op);
}

IterationPlan plan_iteration(const SelectorState& s, std::size_t iter_index) {
  IterationPlan plan;
  plan.iter_index = iter_index;
  if (s.phase == SelectorPhase::kLocked) {
    plan.kernel_intra = *s.choice_intra;
    plan.kernel_inter = *s.choice_inter;
    return plan;
  }
  plan.is_profiling = true;
  plan.kernel_intra = s.candidates_intra[iter_index % s.candidates_intra.size()];
  plan.kernel_inter = s.candidates_inter[iter_index % s.candidates_inter.size()];
  return plan;
}

SelectorState record_timing(SelectorState s, SubgraphRole role, KernelKind kind, double elapsed) {
  if (s.phase == SelectorPhase::kLocked) throw Error("selector is locked; timing not accepted");
  const auto& list = s.candidates(role);
  if (std::find(list.begin(), list.end(), kind) == list.end()) {
    throw Error(std::string(to_string(kind)) + " is not a " + std::string(to_string(role)) + " candidate");
  }
  s.timings[{role, kind}].push_back(elapsed);

  for (SubgraphRole r : {SubgraphRole::kIntra, SubgraphRole::kInter}) {
    for (KernelKind k : s.candidates(r)) {
      if (s.measurements(r, k) < s.profile_iters_per_candidate) return s;
    }
  }
  s.phase = SelectorPhase::kLocked;
  s.choice_intra = fastest(s, SubgraphRole::kIntra);
  s.choice_inter = fastest(s, SubgraphRole::kInter);
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

PreparedSubgraphs prepare_subgraphs(const DecomposedGraph& d) {
  PreparedSubgraphs p;
  p.num_vertices = d.num_vertices;
  p.block_size = d.block_size;
  p.intra_csr = to_csr(d.intra);
  p.intra_dense = to_dense_blocks(d.intra, d.block_size);
  p.inter_csr = to_csr(d.inter);
  p.inter_coo = to_coo(d.inter);
  p.full_in_degree = d.full_in_degree;
  return p;
}

void run_kernel(const PreparedSubgraphs& p, SubgraphRole role, KernelKind kind, const FeatureMatrix& x,
                AggregateOp op, PartialResult& out, const KernelOptions& options) {
  if (!allowed(role, kind)) {
    throw Error(std::string(to_string(kind)) + " cannot run on the " + std::string(to_string(role)) +
                " subgraph");
  }
  if (role == SubgraphRole::kIntra) {
    switch (kind) {
      case KernelKind::kCsrIntraBlocked:
        return aggregate_csr_intra_blocked(p.intra_csr, x, op, p.block_size, options.tile_budget_bytes, out);
      case KernelKind::kDenseBlock:
        return aggregate_dense_block(p.intra_dense, x, op, out);
      default:
        return aggregate_csr_inter(p.intra_csr, x, op, out);
    }
  }
  if (kind == KernelKind::kCooAtomic) return aggregate_coo_atomic(p.inter_coo, x, op, out);
  aggregate_csr_inter(p.inter_csr, x, op, out);
}

PartialResult run_kernel(const PreparedSubgraphs& p, SubgraphRole role, KernelKind kind,
                         const FeatureMatrix& x, AggregateOp op, const KernelOptions& options) {
  PartialResult out;
  run_kernel(p, role, kind, x, op, out, options);
  return out;
}

AdaptiveAggregator::AdaptiveAggregator(const DecomposedGraph& d, SelectorState state, AggregateOp op,
                                       KernelOptions options)
    : AdaptiveAggregator(prepare_subgraphs(d), std::move(state), op, options) {}

AdaptiveAggregator::AdaptiveAggregator(PreparedSubgraphs prepared, SelectorState state, AggregateOp op,
                                       KernelOptions options)
    : prepared_(std::move(prepared)), state_(std::move(state)), op_(op), options_(options) {
  for (SubgraphRole role : {SubgraphRole::kIntra, SubgraphRole::kInter}) {
    for (KernelKind k : state_.candidates(role)) {
      if (!allowed(role, k) || !supports(k, op_)) {
        throw Error(std::string(to_string(k)) + " cannot serve as " + std::string(to_string(role)) +
                    " kernel for " + std::string(to_string(op_)));
      }
    }
  }
}

const FeatureMatrix& AdaptiveAggregator::step(const FeatureMatrix& x, IterationRecord* record) {
  const IterationPlan plan = plan_iteration(state_, iter_);
  const auto t0 = Clock::now();
  run_kernel(prepared_, SubgraphRole::kIntra, plan.kernel_intra, x, op_, intra_, options_);
  const auto t1 = Clock::now();
  run_kernel(prepared_, SubgraphRole::kInter, plan.kernel_inter, x, op_, inter_, options_);
  const auto t2 = Clock::now();
  combine_into(intra_, inter_, op_, prepared_.full_in_degree);
  const auto t3 = Clock::now();

  const double intra_us = elapsed_us(t0, t1);
  const double inter_us = elapsed_us(t1, t2);
  // Lists of unequal length can lock on the first record of an iteration.
  if (plan.is_profiling) {
    state_ = record_timing(std::move(state_), SubgraphRole::kIntra, plan.kernel_intra, intra_us);
    if (state_.phase == SelectorPhase::kProfiling) {
      state_ = record_timing(std::move(state_), SubgraphRole::kInter, plan.kernel_inter, inter_us);
    }
  }
  if (record) {
    *record = {iter_, plan.kernel_intra, plan.kernel_inter, plan.is_profiling, intra_us, inter_us,
               elapsed_us(t0, t3)};
  }
  ++iter_;
  return intra_.values;
}

TrainingLoopResult run_training_loop(const DecomposedGraph& d, const FeatureMatrix& x, AggregateOp op,
                                     std::size_t iters, SelectorState s, KernelOptions options) {
  if (s.phase == SelectorPhase::kProfiling && iters < s.profiling_iterations()) {
    throw Error("training loop of " + std::to_string(iters) + " iterations is shorter than the " +
                std::to_string(s.profiling_iterations()) + "-iteration profiling budget");
  }
  AdaptiveAggregator aggregator(d, std::move(s), op, options);
  TrainingLoopResult out;
  out.trace.reserve(iters);
  for (std::size_t i = 0; i < iters; ++i) {
    IterationRecord rec;
    out.result = aggregator.step(x, &rec);
    out.trace.push_back(rec);
  }
  out.state = aggregator.state();
  return out;
}

}  // namespace adaptgear
