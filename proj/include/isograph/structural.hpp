#pragma once

#include <optional>
#include <vector>

#include "isograph/digraph.hpp"

namespace isograph {

/// A lambda-structural set S together with its depth hierarchy.
///
/// Depth 0 is exactly S. A complement vertex has depth 1 + the largest depth
/// among its out-neighbours (loops ignored), so S_k = {v : depth(v) <= k}.
/// Tombstoned slots carry depth -1.
struct StructuralSet {
  VertexList members;       ///< sorted
  Complex lambda{1.0, 0.0};
  std::vector<int> depth_of;  ///< indexed by vertex slot
  int max_depth = 0;

  bool contains(Vertex v) const { return v < depth_of.size() && depth_of[v] == 0; }
  std::size_t size() const { return members.size(); }
  /// Live vertices outside S, ascending.
  VertexList complement() const;
  /// |S_j| for j = 0..max_depth.
  std::vector<std::size_t> level_sizes() const;
  /// Live vertices sorted by increasing depth (ties by id), the order the lift fills them in.
  VertexList depth_order() const;
};

struct StructuralCheck {
  bool ok = false;
  VertexList cycle_witness;           ///< a non-loop cycle avoiding S (first vertex repeated at the end)
  std::optional<Vertex> loop_witness;  ///< a complement vertex whose loop weight equals lambda

  explicit operator bool() const { return ok; }
};

/// Checks both structural conditions. Throws InvalidInput for an empty S or a dead/out-of-range member.
StructuralCheck validate_structural(const WeightedDigraph& g, const VertexList& s, Complex lambda,
                                    double tol = kDefaultTol);

/// Greedy search: every vertex with loop weight equal to lambda is forced in, then the
/// vertex lying on the most DFS-detected cycles is added until the complement is
/// acyclic, then redundant members are pruned. Not minimum in general.
///
/// With margin > 0, vertices whose loop weight lies within margin of lambda are forced in
/// as well, so every interior denominator lambda - w(v, v) has modulus above margin.
StructuralSet find_structural_set(const WeightedDigraph& g, Complex lambda, double tol = kDefaultTol,
                                  double margin = 0.0);

/// Depth hierarchy of a structural set. Throws NotStructural (with the witness in the message).
StructuralSet compute_depths(const WeightedDigraph& g, const VertexList& s, Complex lambda,
                             double tol = kDefaultTol);

/// Smallest k with (M restricted to the complement)^k = 0, found from the zero pattern
/// alone. Empty complement gives 0; a cycle or loop in the complement gives nullopt.
std::optional<int> nilpotency_index(const WeightedDigraph& g, const VertexList& s);

}  // namespace isograph
