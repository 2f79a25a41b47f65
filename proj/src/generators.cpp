#include "adaptgear/generators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "adaptgear/error.hpp"

namespace adaptgear {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Lemire's nearly-divisionless rejection.
  const std::uint64_t limit = -n % n;
  while (true) {
    const std::uint64_t x = engine_();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    if (static_cast<std::uint64_t>(m) >= limit) return static_cast<std::uint64_t>(m >> 64);
  }
}

namespace {

// Set of occupied adjacency cells keyed by dst * n + src. Dense bitmap for
// small matrices, hash set otherwise.
class CellSet {
 public:
  explicit CellSet(std::size_t n) : n_(n) {
    const unsigned __int128 cells = static_cast<unsigned __int128>(n) * n;
    if (cells <= (std::uint64_t{1} << 27)) bits_.assign((static_cast<std::size_t>(cells) + 63) / 64, 0);
  }

  bool insert(std::uint64_t key) {
    if (!bits_.empty()) {
      std::uint64_t& word = bits_[key >> 6];
      const std::uint64_t mask = std::uint64_t{1} << (key & 63);
      if (word & mask) return false;
      word |= mask;
      ++size_;
      return true;
    }
    if (!hashed_.insert(key).second) return false;
    ++size_;
    return true;
  }

  bool contains(std::uint64_t key) const {
    if (!bits_.empty()) return (bits_[key >> 6] >> (key & 63)) & 1;
    return hashed_.count(key) != 0;
  }

  std::size_t size() const { return size_; }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(size_);
    auto emit = [&](std::uint64_t key) {
      out.push_back({static_cast<VertexId>(key / n_), static_cast<VertexId>(key % n_)});
    };
    if (!bits_.empty()) {
      for (std::size_t w = 0; w < bits_.size(); ++w) {
        std::uint64_t word = bits_[w];
        while (word) {
          emit(w * 64 + static_cast<std::uint64_t>(std::countr_zero(word)));
          word &= word - 1;
        }
      }
    } else {
      for (std::uint64_t key : hashed_) emit(key);
    }
    return out;
  }

 private:
  std::size_t n_;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> bits_;
  std::unordered_set<std::uint64_t> hashed_;
};

// Grows `cells` to `target` distinct cells chosen uniformly among the free
// ones. Past half occupancy the excluded cells are sampled instead.
void fill_uniform(std::size_t n, std::size_t target, CellSet& cells, Rng& rng) {
  const std::uint64_t total = static_cast<std::uint64_t>(n) * n;
  if (cells.size() >= target) return;
  if (target * 2 <= total) {
    while (cells.size() < target) cells.insert(rng.below(total));
    return;
  }
  const std::uint64_t exclude = total - target;
  CellSet excluded(n);
  while (excluded.size() < exclude) {
    const std::uint64_t key = rng.below(total);
    if (!cells.contains(key)) excluded.insert(key);
  }
  for (std::uint64_t key = 0; key < total; ++key) {
    if (!cells.contains(key) && !excluded.contains(key)) cells.insert(key);
  }
}

}  // namespace

Graph generate_rmat(std::size_t num_vertices, std::size_t num_edges, RmatParams probs,
                    std::uint64_t seed) {
  const double sum = probs.a + probs.b + probs.c + probs.d;
  if (std::abs(sum - 1.0) > 1e-9 || probs.a < 0 || probs.b < 0 || probs.c < 0 || probs.d < 0) {
    throw Error("RMAT probabilities must be non-negative and sum to 1");
  }
  if (num_vertices == 0) throw Error("RMAT requires at least one vertex");
  const unsigned __int128 capacity = static_cast<unsigned __int128>(num_vertices) * num_vertices;
  if (num_edges > capacity) {
    throw Error("RMAT edge count " + std::to_string(num_edges) + " exceeds " +
                std::to_string(num_vertices) + "^2 cells");
  }

  const std::size_t scale_vertices = std::bit_ceil(num_vertices);
  const int levels = std::countr_zero(scale_vertices);
  const double ab = probs.a + probs.b;
  const double abc = ab + probs.c;

  Rng rng(seed);
  CellSet cells(num_vertices);
  // Skewed draws collide more and more as the matrix fills; cap the effort
  // and finish with uniform sampling of the free cells.
  const std::uint64_t budget = 8 * static_cast<std::uint64_t>(num_edges) + 1024;
  for (std::uint64_t draw = 0; draw < budget && cells.size() < num_edges; ++draw) {
    std::size_t src = 0;
    std::size_t dst = 0;
    for (int level = 0; level < levels; ++level) {
      const double r = rng.uniform();
      const std::size_t half = scale_vertices >> (level + 1);
      if (r < probs.a) {
      } else if (r < ab) {
        dst += half;
      } else if (r < abc) {
        src += half;
      } else {
        src += half;
        dst += half;
      }
    }
    if (src >= num_vertices || dst >= num_vertices) continue;
    cells.insert(static_cast<std::uint64_t>(dst) * num_vertices + src);
  }
  fill_uniform(num_vertices, num_edges, cells, rng);
  return Graph::from_edges(num_vertices, cells.edges());
}

PlantedGraph generate_planted_partition(const PlantedPartitionParams& params) {
  if (params.groups == 0 || params.group_size == 0) throw Error("planted partition needs at least one group");
  if (params.p_in < 0 || params.p_in > 1 || params.p_out < 0 || params.p_out > 1) {
    throw Error("planted partition probabilities must lie in [0, 1]");
  }
  const std::size_t n = params.groups * params.group_size;
  Rng rng(params.seed);

  std::vector<VertexId> shuffle(n);
  std::iota(shuffle.begin(), shuffle.end(), VertexId{0});
  std::shuffle(shuffle.begin(), shuffle.end(), rng.engine());

  std::vector<Edge> edges;
  auto add_pair = [&](std::size_t i, std::size_t j) {
    edges.push_back({shuffle[i], shuffle[j]});
    edges.push_back({shuffle[j], shuffle[i]});
  };
  // Bernoulli(p) over the index range [lo, hi) with geometric skipping.
  auto sample_range = [&](std::size_t i, std::size_t lo, std::size_t hi, double p) {
    if (p <= 0 || lo >= hi) return;
    if (p >= 1) {
      for (std::size_t j = lo; j < hi; ++j) add_pair(i, j);
      return;
    }
    const double log_q = std::log1p(-p);
    std::size_t j = lo;
    while (true) {
      const double u = 1.0 - rng.uniform();  // (0, 1]
      const double skip = std::floor(std::log(u) / log_q);
      if (skip >= static_cast<double>(hi - j)) break;
      j += static_cast<std::size_t>(skip);
      add_pair(i, j);
      ++j;
      if (j >= hi) break;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t group_end = (i / params.group_size + 1) * params.group_size;
    sample_range(i, i + 1, group_end, params.p_in);
    sample_range(i, group_end, n, params.p_out);
  }

  PlantedGraph out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.labels[shuffle[i]] = static_cast<std::uint32_t>(i / params.group_size);
  }
  out.graph = Graph::from_edges(n, std::move(edges));
  return out;
}

Graph generate_uniform(std::size_t num_vertices, std::size_t num_edges, bool weighted,
                       std::uint64_t seed) {
  const unsigned __int128 cells = static_cast<unsigned __int128>(num_vertices) * num_vertices;
  if (num_edges > cells) throw Error("edge count exceeds available cells");
  Rng rng(seed);
  CellSet set(num_vertices);
  fill_uniform(num_vertices, num_edges, set, rng);
  std::vector<Edge> edges = set.edges();
  std::sort(edges.begin(), edges.end());
  if (!weighted) return Graph::from_edges(num_vertices, std::move(edges));
  std::vector<Scalar> w(edges.size());
  for (auto& x : w) x = static_cast<Scalar>(rng.uniform(0.5, 2.0));
  return Graph::from_edges(num_vertices, std::move(edges), std::move(w));
}

FeatureMatrix random_features(std::size_t num_vertices, std::size_t dim, std::uint64_t seed,
                              Scalar lo, Scalar hi) {
  Rng rng(seed);
  std::vector<Scalar> data(num_vertices * dim);
  for (auto& x : data) x = static_cast<Scalar>(rng.uniform(lo, hi));
  return FeatureMatrix(num_vertices, dim, std::move(data));
}

}  // namespace adaptgear
