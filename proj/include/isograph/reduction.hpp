#pragma once

#include <Eigen/Dense>

#include "isograph/branches.hpp"

namespace isograph {

/// R_S(G, lambda): the S x S matrix of summed branch weights.
struct ReducedMatrix {
  VertexList index;  ///< row/column k corresponds to vertex index[k] (the members of S)
  Eigen::MatrixXcd entries;
  Complex lambda;
};

/// The N x N matrix of summed branch weights over every vertex pair, at lambda = 1
/// on a stochastic graph. Indexed by vertex slot; tombstone rows/columns are zero.
struct ExtendedReducedMatrix {
  Eigen::MatrixXd entries;

  /// The S x S block, which is the reduced matrix at lambda = 1.
  Eigen::MatrixXd structural_block(const VertexList& s) const;
};

/// w(i0,i1) * prod over interior vertices l of w(i_l, i_{l+1}) / (lambda - w(i_l, i_l)).
/// Throws SingularWeight when an interior denominator is within tol of zero.
Complex branch_weight(const WeightedDigraph& g, const Branch& b, Complex lambda,
                      double tol = kDefaultTol);

/// Plain product of edge weights: the branch weight at lambda = 1 on a loop-free
/// stochastic graph.
double path_product(const WeightedDigraph& g, const Branch& b);

ReducedMatrix reduced_matrix(const WeightedDigraph& g, const StructuralSet& s, Complex lambda,
                             double tol = kDefaultTol);
/// Same, summing over an already enumerated branch set.
ReducedMatrix reduced_matrix(const WeightedDigraph& g, const StructuralSet& s,
                             const BranchSet& branches, Complex lambda, double tol = kDefaultTol);

/// R^(p): the reduced matrix restricted to branches of length exactly p.
/// Requires 1 <= p <= |complement| + 1.
Eigen::MatrixXcd reduced_matrix_by_length(const WeightedDigraph& g, const StructuralSet& s,
                                          Complex lambda, std::size_t p, double tol = kDefaultTol);

/// Throws InvalidMode unless g carries the stochastic flag and S is 1-structural.
ExtendedReducedMatrix extended_reduced_matrix(const WeightedDigraph& g, const StructuralSet& s);
ExtendedReducedMatrix extended_reduced_matrix(const WeightedDigraph& g, const StructuralSet& s,
                                              const BranchSet& branches);

}  // namespace isograph
