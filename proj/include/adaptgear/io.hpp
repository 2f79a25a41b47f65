#pragma once

#include <filesystem>
#include <iosfwd>

#include "adaptgear/graph.hpp"

namespace adaptgear {

/// Reads a "src<TAB>dst[<TAB>weight]" edge list (any whitespace separates
/// fields). Lines starting with '#' are comments; an optional
/// "% vertices N" line fixes the vertex count, otherwise it is 1 + max id.
/// Unweighted files yield an unweighted graph; `weighted` requires a third
/// column on every edge line.
Graph load_edge_list(const std::filesystem::path& path, bool weighted = false);
Graph read_edge_list(std::istream& in, bool weighted = false);

/// Writes the graph back in "src\tdst[\tweight]" order with a vertex header.
void write_edge_list(const Graph& g, std::ostream& out);

}  // namespace adaptgear
