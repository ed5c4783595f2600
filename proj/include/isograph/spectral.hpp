#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "isograph/reduction.hpp"
#include "isograph/sparse.hpp"

namespace isograph {

enum class Normalization {
  L1Positive,  ///< entries sum to one (dominant / stochastic vectors)
  L2Unit,      ///< unit Euclidean norm
};

const char* to_string(Normalization n);

/// An eigenvalue with its eigenvector indexed by an explicit vertex list.
struct EigenPair {
  Complex lambda;
  VertexList vertices;
  Eigen::VectorXcd vector;
  Normalization normalization = Normalization::L2Unit;

  /// Entry for vertex v, zero when v is not indexed.
  Complex at(Vertex v) const;

  nlohmann::json to_json() const;
  static EigenPair from_json(const nlohmann::json& j);
};

/// Scales v in place to the requested normalization.
void normalize(Eigen::VectorXcd& v, Normalization n);

struct PowerIterationOptions {
  enum class Primitivity { Check, Attested };

  std::size_t max_iters = 1000;  ///< the cap l of the cost model
  double tol = 1e-12;            ///< on the L1 change between iterates
  Primitivity primitivity = Primitivity::Check;
  /// Iterate (A + I) / 2 instead of A. Same Perron vector, and primitive for any
  /// irreducible A, so periodic chains such as a bare cycle still converge.
  bool lazy = false;
  Eigen::VectorXd initial;  ///< empty means uniform
};

struct PowerIterationResult {
  EigenPair pair;  ///< L1-positive; vertices are 0..n-1 for a bare matrix
  std::size_t iterations = 0;
  double residual = 0.0;  ///< ||A v - lambda v||_1
  bool converged = false;
};

/// Wielandt test: A (non-negative, n x n) is primitive iff A^((n-1)^2 + 1) > 0 entrywise.
/// Cubic per squaring, so meant for small matrices.
bool is_primitive_matrix(const Eigen::MatrixXd& a);

/// Dominant eigenpair of a non-negative matrix by power iteration. Throws NotPrimitive when
/// the check fails (unless attested) and IterationFailed if an iterate vanishes. Hitting the
/// cap returns the last iterate with converged = false.
PowerIterationResult power_iteration(const Eigen::MatrixXd& a, const PowerIterationOptions& opts = {});

/// Same iteration over a sparse matrix using the OpenMP spmv kernel. There is no dense
/// primitivity test here; Check falls back to the graph test on `pattern` when given.
PowerIterationResult power_iteration(const CsrMatrix& a, const PowerIterationOptions& opts = {},
                                     const WeightedDigraph* pattern = nullptr);

struct Theorem1Check {
  double residual = 0.0;  ///< ||R u_S - lambda u_S|| / ||u_S||
  bool degenerate = false;  ///< u_S vanished, so the ratio is undefined
};

/// Restricts an eigenpair of M_G to S and measures how well it solves R_S(G, lambda) u_S = lambda u_S.
Theorem1Check verify_theorem1(const WeightedDigraph& g, const StructuralSet& s, const EigenPair& eig,
                              double tol = kDefaultTol);

/// Eigenvector of M_G from an eigenvector of the reduced matrix (indexed like s.members),
/// filled in by increasing depth:
///   u_l = sum_j w(l, j) u_j / (lambda - w(l, l)),  j ranging over the out-neighbours of l.
/// Indexed by the live vertices. Throws SingularWeight if lambda hits a complement loop weight.
EigenPair lift_eigenvector(const WeightedDigraph& g, const StructuralSet& s, Complex lambda,
                           const Eigen::VectorXcd& u_s, Normalization norm = Normalization::L2Unit,
                           double tol = kDefaultTol);

struct CoIterationOptions {
  enum class Mode {
    /// Each step applies u <- versor(R(lambda) u), lambda <- |R(lambda) u| / |u| once.
    Plain,
    /// The same update run to convergence at fixed lambda gives g(lambda); the fixed
    /// point g(lambda) = lambda is then bracketed and found by regula falsi.
    Safeguarded,
  };
  Mode mode = Mode::Safeguarded;
  std::size_t max_iters = 200;
  std::size_t inner_iters = 10000;
  double tol = 1e-12;
};

struct CoIterationResult {
  double lambda = 0.0;
  EigenPair u_s;  ///< L2-unit, positive
  std::size_t iterations = 0;
  std::vector<double> trace;  ///< successive lambda values
};

/// Joint (lambda, u_S) iteration on R_S(G, lambda) for non-stochastic, non-negative,
/// loop-free graphs. Throws IterationFailed (message carries the trace) on divergence,
/// a singular re-evaluation or running out of iterations.
CoIterationResult reduced_eigen_co_iteration(const WeightedDigraph& g, const StructuralSet& s,
                                             double initial_lambda,
                                             const Eigen::VectorXd& initial_u_s,
                                             const CoIterationOptions& opts = {});

}  // namespace isograph
