#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "adaptgear/graph.hpp"

namespace adaptgear {

enum class Model { kGcn, kGin, kAggOnly };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);

/// Parameters of the update step that follows aggregation.
struct LayerParams {
  Model model = Model::kAggOnly;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<Scalar> weight;  // row-major in_dim x out_dim
  Scalar gin_eps = 0;

  /// Weights drawn uniformly from [-0.1, 0.1).
  static LayerParams seeded(Model model, std::size_t in_dim, std::size_t out_dim, std::uint64_t seed,
                            Scalar gin_eps = 0);
  static LayerParams identity(Model model, std::size_t dim, Scalar gin_eps = 0);
  void validate(std::size_t feat_dim) const;
};

/// A + I with symmetric normalization: edge (d, s) gets 1 / sqrt(deg(d) deg(s))
/// where deg counts incoming edges of A + I. Existing self-loops are kept once.
Graph gcn_normalize(const Graph& g);

/// X * W, accumulated in ascending input-dimension order.
FeatureMatrix linear(const FeatureMatrix& x, const LayerParams& p);

/// (1 + eps) * x + aggregated.
FeatureMatrix gin_combine(const FeatureMatrix& x, const FeatureMatrix& aggregated, Scalar eps);

}  // namespace adaptgear
