#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "adaptgear/graph.hpp"

namespace adaptgear {

/// Seeded 64-bit generator with platform-stable real sampling (the standard
/// distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct RmatParams {
  double a = 0.57;
  double b = 0.19;
  double c = 0.19;
  double d = 0.05;
};

/// Recursive-matrix generator. num_vertices is rounded up to a power of two
/// for the recursion; cells beyond the requested count are redrawn. Returns
/// exactly num_edges distinct edges. When the skewed draws stall (very dense
/// requests) the remainder is filled with uniformly chosen free cells.
Graph generate_rmat(std::size_t num_vertices, std::size_t num_edges, RmatParams probs,
                    std::uint64_t seed);

struct PlantedPartitionParams {
  std::size_t groups = 8;
  std::size_t group_size = 16;
  double p_in = 0.5;
  double p_out = 0.01;
  std::uint64_t seed = 1;
};

struct PlantedGraph {
  Graph graph;
  /// Ground-truth group per (shuffled) vertex id.
  std::vector<std::uint32_t> labels;
};

/// Symmetric planted-partition graph without self-loops. Vertex ids are
/// shuffled so that the planted groups are not already contiguous.
PlantedGraph generate_planted_partition(const PlantedPartitionParams& params);

/// Directed Erdos-Renyi style graph with `num_edges` distinct edges (self
/// loops allowed), optionally with weights uniform in [0.5, 2).
Graph generate_uniform(std::size_t num_vertices, std::size_t num_edges, bool weighted,
                       std::uint64_t seed);

/// Features uniform in [lo, hi).
FeatureMatrix random_features(std::size_t num_vertices, std::size_t dim, std::uint64_t seed,
                              Scalar lo = -1, Scalar hi = 1);

}  // namespace adaptgear
