#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "isograph/types.hpp"

namespace isograph {

/// Weighted directed graph G = (V, E, w) with complex weights.
///
/// Entry (i, j) of the adjacency matrix is the weight of the edge i -> j; a
/// missing edge reads as zero and a stored edge is never zero. Removed
/// vertices stay behind as tombstones (no edges, not live) until compact()
/// renumbers the survivors.
///
/// The stochastic flag asserts the page-rank setting: real weights in [0, 1],
/// every live column summing to one, and no loops. Any mutation clears it.
class WeightedDigraph {
 public:
  using Adjacency = std::map<Vertex, Complex>;

  WeightedDigraph() = default;
  explicit WeightedDigraph(std::size_t n);

  std::size_t slot_count() const { return out_.size(); }
  std::size_t live_count() const { return live_count_; }
  bool is_live(Vertex v) const { return v < live_.size() && live_[v]; }
  VertexList live_vertices() const;

  Vertex add_vertex();
  /// Drops every incident edge and leaves a tombstone.
  void remove_vertex(Vertex v);
  /// Renumbers live vertices densely; returns old slot -> new id (npos for tombstones).
  std::vector<Vertex> compact();

  /// Inserts or overwrites an edge. A zero weight removes the edge.
  void set_weight(Vertex i, Vertex j, Complex w);
  bool remove_edge(Vertex i, Vertex j);

  Complex weight(Vertex i, Vertex j) const;
  bool has_edge(Vertex i, Vertex j) const;
  Complex loop_weight(Vertex v) const { return weight(v, v); }
  bool has_loops() const;

  const Adjacency& out_edges(Vertex v) const { return out_.at(v); }
  const Adjacency& in_edges(Vertex v) const { return in_.at(v); }
  std::size_t edge_count() const { return edge_count_; }

  /// Sum of the real parts of column j (the weights of edges entering j).
  double column_sum(Vertex j) const;
  /// Rescales column j to sum one; a zero column is left empty.
  void normalize_column(Vertex j);

  bool stochastic() const { return stochastic_; }
  bool is_column_stochastic(double tol = 1e-10) const;
  /// Validates the stochastic assumptions and sets the flag; throws InvalidMode otherwise.
  void mark_stochastic(double tol = 1e-10);

  /// slot_count x slot_count adjacency matrix (tombstone rows/columns are zero).
  Eigen::MatrixXcd dense() const;
  Eigen::MatrixXd dense_real() const;

  bool operator==(const WeightedDigraph& other) const;

 private:
  void check_vertex(Vertex v) const;

  std::vector<Adjacency> out_;
  std::vector<Adjacency> in_;
  std::vector<bool> live_;
  std::size_t live_count_ = 0;
  std::size_t edge_count_ = 0;
  bool stochastic_ = false;
};

/// Reverses every edge, keeping weights.
WeightedDigraph transpose(const WeightedDigraph& g);

/// Strong connectivity over live vertices.
bool is_strongly_connected(const WeightedDigraph& g);

/// Period of a strongly connected graph (gcd of cycle lengths); 0 when not strongly connected.
std::size_t period(const WeightedDigraph& g);

/// Primitivity of the non-negative adjacency pattern: strongly connected with period one.
/// Linear time, so it is the check used on large graphs.
bool is_primitive(const WeightedDigraph& g);

}  // namespace isograph
