#include "isograph/reduction.hpp"

#include <algorithm>
#include <string>

namespace isograph {

Eigen::MatrixXd ExtendedReducedMatrix::structural_block(const VertexList& s) const {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd block(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      block(a, b) = entries(Eigen::Index(s[std::size_t(a)]), Eigen::Index(s[std::size_t(b)]));
  return block;
}

Complex branch_weight(const WeightedDigraph& g, const Branch& b, Complex lambda, double tol) {
  const auto& v = b.vertices;
  Complex w = g.weight(v[0], v[1]);
  for (std::size_t l = 1; l + 1 < v.size(); ++l) {
    const Complex denom = lambda - g.loop_weight(v[l]);
    if (std::abs(denom) <= tol)
      throw Error(ErrorKind::SingularWeight,
                  "lambda equals the loop weight of interior vertex " + std::to_string(v[l] + 1));
    w *= g.weight(v[l], v[l + 1]) / denom;
  }
  return w;
}

double path_product(const WeightedDigraph& g, const Branch& b) {
  double w = 1.0;
  for (std::size_t l = 0; l + 1 < b.vertices.size(); ++l)
    w *= g.weight(b.vertices[l], b.vertices[l + 1]).real();
  return w;
}

namespace {

std::vector<Eigen::Index> position_in(const WeightedDigraph& g, const VertexList& members) {
  std::vector<Eigen::Index> pos(g.slot_count(), -1);
  for (std::size_t k = 0; k < members.size(); ++k) pos[members[k]] = Eigen::Index(k);
  return pos;
}

}  // namespace

ReducedMatrix reduced_matrix(const WeightedDigraph& g, const StructuralSet& s,
                             const BranchSet& branches, Complex lambda, double tol) {
  const auto pos = position_in(g, s.members);
  const auto n = static_cast<Eigen::Index>(s.size());
  ReducedMatrix r{s.members, Eigen::MatrixXcd::Zero(n, n), lambda};
  for (const Branch& b : branches.all()) {
    const auto row = pos[b.front()];
    const auto col = pos[b.back()];
    if (row < 0 || col < 0) continue;
    r.entries(row, col) += branch_weight(g, b, lambda, tol);
  }
  return r;
}

ReducedMatrix reduced_matrix(const WeightedDigraph& g, const StructuralSet& s, Complex lambda,
                             double tol) {
  const auto branches = enumerate_branches(g, s, {.starts_in_s = true, .ends_in_s = true});
  return reduced_matrix(g, s, branches, lambda, tol);
}

Eigen::MatrixXcd reduced_matrix_by_length(const WeightedDigraph& g, const StructuralSet& s,
                                          Complex lambda, std::size_t p, double tol) {
  const std::size_t complement = g.live_count() - s.size();
  if (p < 1 || p > complement + 1)
    throw Error(ErrorKind::InvalidInput, "branch length " + std::to_string(p) + " outside 1.." +
                                             std::to_string(complement + 1));
  const auto pos = position_in(g, s.members);
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  const auto branches = enumerate_branches(g, s, {.starts_in_s = true, .ends_in_s = true});
  for (const Branch& b : branches.all())
    if (b.length() == p) r(pos[b.front()], pos[b.back()]) += branch_weight(g, b, lambda, tol);
  return r;
}

ExtendedReducedMatrix extended_reduced_matrix(const WeightedDigraph& g, const StructuralSet& s,
                                              const BranchSet& branches) {
  if (!g.stochastic())
    throw Error(ErrorKind::InvalidMode, "extended reduced matrix needs a stochastic graph");
  if (s.lambda != Complex{1.0, 0.0})
    throw Error(ErrorKind::InvalidMode, "extended reduced matrix is defined at lambda = 1");
  const auto n = static_cast<Eigen::Index>(g.slot_count());
  ExtendedReducedMatrix r{Eigen::MatrixXd::Zero(n, n)};
  for (const Branch& b : branches.all())
    r.entries(Eigen::Index(b.front()), Eigen::Index(b.back())) += path_product(g, b);
  return r;
}

ExtendedReducedMatrix extended_reduced_matrix(const WeightedDigraph& g, const StructuralSet& s) {
  if (!g.stochastic())
    throw Error(ErrorKind::InvalidMode, "extended reduced matrix needs a stochastic graph");
  return extended_reduced_matrix(g, s, enumerate_branches(g, s));
}

}  // namespace isograph
