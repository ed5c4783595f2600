#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "isograph/digraph.hpp"

namespace isograph {

// Two interchangeable on-disk forms, both one-based:
//
//   edge list          JSON
//   ---------          ----
//   N 3                {"n": 3, "edges": [[1, 2, 1.0, 0.0], ...]}
//   1 2 1.0
//   2 3 0.5 0.25
//
// Edge-list lines are `i j re [im]`; blank lines and `#` comments are ignored.

WeightedDigraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const WeightedDigraph& g);

WeightedDigraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const WeightedDigraph& g);

/// Picks the format from the first non-blank character ('{' means JSON).
WeightedDigraph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const WeightedDigraph& g);

nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

}  // namespace isograph
