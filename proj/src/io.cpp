#include "adaptgear/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "adaptgear/error.hpp"

namespace adaptgear {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view next_token(std::string_view& s) {
  const auto start = s.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) {
    s = {};
    return {};
  }
  s.remove_prefix(start);
  const auto end = s.find_first_of(" \t\r");
  std::string_view tok = s.substr(0, end);
  s.remove_prefix(end == std::string_view::npos ? s.size() : end);
  return tok;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error("edge list line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_id(std::string_view tok, std::size_t line_no) {
  if (tok.empty()) parse_error(line_no, "missing vertex id");
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range) parse_error(line_no, "vertex id overflow");
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    parse_error(line_no, "invalid vertex id '" + std::string(tok) + "'");
  }
  if (v > static_cast<std::uint64_t>(INT32_MAX) - 1) parse_error(line_no, "vertex id overflow");
  return v;
}

Scalar parse_weight(std::string_view tok, std::size_t line_no) {
  // std::from_chars for float is available in libstdc++ 11.
  float w = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    parse_error(line_no, "invalid weight '" + std::string(tok) + "'");
  }
  return w;
}

}  // namespace

Graph read_edge_list(std::istream& in, bool weighted) {
  std::vector<Edge> edges;
  std::vector<Scalar> weights;
  std::optional<std::uint64_t> header_vertices;
  std::uint64_t max_id = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;
    if (rest.front() == '%') {
      rest.remove_prefix(1);
      if (next_token(rest) != "vertices") parse_error(line_no, "unknown header");
      header_vertices = parse_id(next_token(rest), line_no);
      continue;
    }
    const std::uint64_t src = parse_id(next_token(rest), line_no);
    const std::uint64_t dst = parse_id(next_token(rest), line_no);
    const std::string_view w = next_token(rest);
    if (weighted) {
      if (w.empty()) parse_error(line_no, "missing weight");
      weights.push_back(parse_weight(w, line_no));
    }
    if (!next_token(rest).empty() || (!weighted && !w.empty())) {
      parse_error(line_no, "unexpected extra field");
    }
    max_id = std::max({max_id, src, dst});
    edges.push_back({static_cast<VertexId>(dst), static_cast<VertexId>(src)});
  }
  if (edges.empty() && !header_vertices) throw Error("edge list is empty");

  std::uint64_t n = edges.empty() ? 0 : max_id + 1;
  if (header_vertices) {
    if (!edges.empty() && *header_vertices <= max_id) {
      throw Error("header declares " + std::to_string(*header_vertices) +
                  " vertices but id " + std::to_string(max_id) + " is present");
    }
    n = *header_vertices;
  }
  if (weighted) return Graph::from_edges(n, std::move(edges), std::move(weights));
  return Graph::from_edges(n, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path, bool weighted) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list " + path.string());
  return read_edge_list(in, weighted);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << "% vertices " << g.num_vertices() << '\n';
  out.precision(std::numeric_limits<Scalar>::max_digits10);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out << edges[i].src << '\t' << edges[i].dst;
    if (g.weighted()) out << '\t' << g.weight(i);
    out << '\n';
  }
}

}  // namespace adaptgear
