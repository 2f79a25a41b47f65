#include "adaptgear/reorder.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <queue>
#include <string>

#include "adaptgear/error.hpp"

namespace adaptgear {

std::size_t Partition::num_communities() const {
  if (community_of.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(community_of.begin(), community_of.end())) + 1;
}

void Partition::validate() const {
  if (community_of.size() != num_vertices || permutation.size() != num_vertices) {
    throw Error("partition arrays do not match vertex count");
  }
  std::vector<std::uint8_t> seen(num_vertices, 0);
  for (VertexId p : permutation) {
    if (p >= num_vertices || seen[p]) throw Error("partition permutation is not a bijection");
    seen[p] = 1;
  }
  const std::size_t k = num_communities();
  std::vector<std::size_t> lo(k, SIZE_MAX), hi(k, 0), count(k, 0);
  for (std::size_t v = 0; v < num_vertices; ++v) {
    const std::size_t c = community_of[v];
    lo[c] = std::min<std::size_t>(lo[c], permutation[v]);
    hi[c] = std::max<std::size_t>(hi[c], permutation[v]);
    ++count[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (count[c] == 0) throw Error("community indices are not contiguous");
    if (hi[c] - lo[c] + 1 != count[c]) throw Error("community " + std::to_string(c) + " is not contiguous");
    if (count[c] > comm_size) throw Error("community " + std::to_string(c) + " exceeds comm_size");
  }
}

Partition Partition::identity(std::size_t num_vertices, std::size_t comm_size) {
  if (comm_size == 0) throw Error("comm_size must be positive");
  Partition p;
  p.num_vertices = num_vertices;
  p.comm_size = comm_size;
  p.permutation.resize(num_vertices);
  std::iota(p.permutation.begin(), p.permutation.end(), VertexId{0});
  p.community_of.resize(num_vertices);
  for (std::size_t v = 0; v < num_vertices; ++v) p.community_of[v] = static_cast<std::uint32_t>(v / comm_size);
  return p;
}

Partition cluster_bfs(const Graph& g, std::size_t comm_size, std::uint64_t /*seed*/) {
  if (comm_size == 0) throw Error("comm_size must be positive");
  const std::size_t n = g.num_vertices();

  // Undirected neighbor lists without self-loops, ascending and unique.
  std::vector<std::uint32_t> offset(n + 1, 0);
  for (const Edge& e : g.edges()) {
    if (e.dst == e.src) continue;
    ++offset[e.dst + 1];
    ++offset[e.src + 1];
  }
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  std::vector<VertexId> adj(offset[n]);
  {
    std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
    for (const Edge& e : g.edges()) {
      if (e.dst == e.src) continue;
      adj[fill[e.dst]++] = e.src;
      adj[fill[e.src]++] = e.dst;
    }
  }
  std::vector<std::uint32_t> degree(n);
  std::vector<std::uint32_t> begin(n), end(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto first = adj.begin() + offset[v];
    auto last = adj.begin() + offset[v + 1];
    std::sort(first, last);
    last = std::unique(first, last);
    begin[v] = offset[v];
    end[v] = static_cast<std::uint32_t>(last - adj.begin());
    degree[v] = end[v] - begin[v];
  }

  std::vector<VertexId> seeds(n);
  std::iota(seeds.begin(), seeds.end(), VertexId{0});
  std::stable_sort(seeds.begin(), seeds.end(),
                   [&](VertexId a, VertexId b) { return degree[a] > degree[b]; });

  Partition p;
  p.num_vertices = n;
  p.comm_size = comm_size;
  p.community_of.assign(n, 0);
  p.permutation.assign(n, 0);
  std::vector<std::uint8_t> assigned(n, 0);
  std::vector<std::uint32_t> links(n, 0);
  std::vector<VertexId> touched;

  // Max-heap on (links into region, -id).
  auto lower = [](const std::pair<std::uint32_t, VertexId>& a,
                  const std::pair<std::uint32_t, VertexId>& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<std::pair<std::uint32_t, VertexId>,
                      std::vector<std::pair<std::uint32_t, VertexId>>, decltype(lower)>
      frontier(lower);

  std::size_t next_seed = 0;
  VertexId next_id = 0;
  std::uint32_t community = 0;
  while (next_id < n) {
    std::size_t size = 0;
    auto absorb = [&](VertexId v) {
      assigned[v] = 1;
      p.community_of[v] = community;
      p.permutation[v] = next_id++;
      ++size;
      for (std::uint32_t k = begin[v]; k < end[v]; ++k) {
        const VertexId w = adj[k];
        if (assigned[w]) continue;
        if (links[w] == 0) touched.push_back(w);
        frontier.emplace(++links[w], w);
      }
    };
    while (size < comm_size && next_id < n) {
      while (!frontier.empty()) {
        const auto [l, w] = frontier.top();
        if (assigned[w] || l != links[w]) {
          frontier.pop();
          continue;
        }
        break;
      }
      if (!frontier.empty()) {
        const VertexId w = frontier.top().second;
        frontier.pop();
        absorb(w);
        continue;
      }
      while (assigned[seeds[next_seed]]) ++next_seed;
      absorb(seeds[next_seed]);
    }
    frontier = decltype(frontier)(lower);
    for (VertexId w : touched) links[w] = 0;
    touched.clear();
    ++community;
  }
  return p;
}

Partition read_partition(std::istream& in, std::size_t comm_size) {
  if (comm_size == 0) throw Error("comm_size must be positive");
  std::vector<std::int64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::int64_t id = 0;
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    const auto [ptr, ec] = std::from_chars(b, e, id);
    if (ec != std::errc{} || ptr != e) {
      throw Error("partition line " + std::to_string(line_no) + ": invalid community id");
    }
    if (id < 0) throw Error("partition line " + std::to_string(line_no) + ": negative community id");
    ids.push_back(id);
  }

  if (ids.empty()) throw Error("partition file has no entries");
  const std::size_t n = ids.size();
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return ids[a] < ids[b]; });

  Partition p;
  p.num_vertices = n;
  p.comm_size = comm_size;
  p.community_of.resize(n);
  p.permutation.resize(n);
  std::uint32_t community = 0;
  std::size_t fill = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const VertexId v = order[pos];
    if (pos > 0 && (ids[v] != ids[order[pos - 1]] || fill == comm_size)) {
      ++community;
      fill = 0;
    }
    p.community_of[v] = community;
    p.permutation[v] = static_cast<VertexId>(pos);
    ++fill;
  }
  return p;
}

Partition load_partition(const std::filesystem::path& path, std::size_t comm_size) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open partition file " + path.string());
  return read_partition(in, comm_size);
}

Graph apply_reorder(const Graph& g, const Partition& p) {
  if (p.num_vertices != g.num_vertices()) {
    throw Error("partition covers " + std::to_string(p.num_vertices) + " vertices but graph has " +
                std::to_string(g.num_vertices()));
  }
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) edges.push_back({p.permutation[e.dst], p.permutation[e.src]});
  if (!g.weighted()) return Graph::from_edges(g.num_vertices(), std::move(edges));
  const auto w = g.weights();
  return Graph::from_edges(g.num_vertices(), std::move(edges), std::vector<Scalar>(w.begin(), w.end()));
}

FeatureMatrix permute_rows(const FeatureMatrix& x, const Partition& p) {
  if (p.num_vertices != x.num_vertices()) throw Error("partition / feature size mismatch");
  FeatureMatrix out(x.num_vertices(), x.dim());
  for (std::size_t v = 0; v < x.num_vertices(); ++v) {
    std::copy(x.row(v).begin(), x.row(v).end(), out.row(p.permutation[v]).begin());
  }
  return out;
}

FeatureMatrix unpermute_rows(const FeatureMatrix& x, const Partition& p) {
  if (p.num_vertices != x.num_vertices()) throw Error("partition / feature size mismatch");
  FeatureMatrix out(x.num_vertices(), x.dim());
  for (std::size_t v = 0; v < x.num_vertices(); ++v) {
    std::copy(x.row(p.permutation[v]).begin(), x.row(p.permutation[v]).end(), out.row(v).begin());
  }
  return out;
}

}  // namespace adaptgear
