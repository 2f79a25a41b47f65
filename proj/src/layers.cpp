#include "adaptgear/layers.hpp"

#include <cmath>
#include <string>

#include "adaptgear/error.hpp"
#include "adaptgear/generators.hpp"

namespace adaptgear {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::kGcn: return "gcn";
    case Model::kGin: return "gin";
    case Model::kAggOnly: return "agg-only";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::kGcn, Model::kGin, Model::kAggOnly}) {
    if (to_string(m) == name) return m;
  }
  if (name == "agg_only") return Model::kAggOnly;
  throw Error("unknown model '" + std::string(name) + "'");
}

LayerParams LayerParams::seeded(Model model, std::size_t in_dim, std::size_t out_dim, std::uint64_t seed,
                                Scalar gin_eps) {
  LayerParams p;
  p.model = model;
  p.in_dim = in_dim;
  p.out_dim = out_dim;
  p.gin_eps = gin_eps;
  p.weight.resize(in_dim * out_dim);
  Rng rng(seed);
  for (Scalar& w : p.weight) w = static_cast<Scalar>(rng.uniform(-0.1, 0.1));
  return p;
}

LayerParams LayerParams::identity(Model model, std::size_t dim, Scalar gin_eps) {
  LayerParams p;
  p.model = model;
  p.in_dim = dim;
  p.out_dim = dim;
  p.gin_eps = gin_eps;
  p.weight.assign(dim * dim, 0);
  for (std::size_t i = 0; i < dim; ++i) p.weight[i * dim + i] = 1;
  return p;
}

void LayerParams::validate(std::size_t feat_dim) const {
  if (weight.size() != in_dim * out_dim) throw Error("layer weight size does not match its shape");
  if (feat_dim != in_dim) {
    throw Error("layer expects " + std::to_string(in_dim) + " input features, got " + std::to_string(feat_dim));
  }
}

Graph gcn_normalize(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (std::size_t v = 0; v < n; ++v) edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v)});
  const Graph with_loops = Graph::from_edges(n, std::move(edges));
  const auto deg = with_loops.in_degrees();
  std::vector<Scalar> w;
  w.reserve(with_loops.num_edges());
  for (const Edge& e : with_loops.edges()) {
    w.push_back(static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(deg[e.dst]) * deg[e.src])));
  }
  std::vector<Edge> canonical(with_loops.edges().begin(), with_loops.edges().end());
  return Graph::from_edges(n, std::move(canonical), std::move(w));
}

FeatureMatrix linear(const FeatureMatrix& x, const LayerParams& p) {
  p.validate(x.dim());
  const std::size_t n = x.num_vertices();
  FeatureMatrix out(n, p.out_dim);
#pragma omp parallel for schedule(static)
  for (std::size_t v = 0; v < n; ++v) {
    Scalar* y = out.data() + v * p.out_dim;
    for (std::size_t i = 0; i < p.in_dim; ++i) {
      const Scalar xi = x.at(v, i);
      const Scalar* w = p.weight.data() + i * p.out_dim;
      for (std::size_t j = 0; j < p.out_dim; ++j) y[j] += xi * w[j];
    }
  }
  return out;
}

FeatureMatrix gin_combine(const FeatureMatrix& x, const FeatureMatrix& aggregated, Scalar eps) {
  if (x.num_vertices() != aggregated.num_vertices() || x.dim() != aggregated.dim()) {
    throw Error("GIN inputs have mismatched shapes");
  }
  FeatureMatrix out = aggregated;
  const Scalar scale = Scalar{1} + eps;
  for (std::size_t v = 0; v < x.num_vertices(); ++v) {
    auto y = out.row(v);
    const auto xr = x.row(v);
    for (std::size_t f = 0; f < x.dim(); ++f) y[f] = scale * xr[f] + y[f];
  }
  return out;
}

}  // namespace adaptgear
