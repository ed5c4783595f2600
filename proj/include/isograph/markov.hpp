#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <json.hpp>

#include "isograph/reduction.hpp"

namespace isograph {

/// Finite Markov chain with ROW-stochastic transition matrix P (P_ij = Pr[i -> j]).
///
/// The page-rank graphs elsewhere in the library are column-stochastic. The two
/// meet by transposition: a column-stochastic M_G is the chain P = M_G^T, and the
/// dominant eigenvector of M_G is the stationary distribution of P.
class MarkovChain {
 public:
  explicit MarkovChain(Eigen::MatrixXd transition, double tol = 1e-12);

  static MarkovChain from_column_stochastic(const WeightedDigraph& g);

  std::size_t states() const { return std::size_t(p_.rows()); }
  const Eigen::MatrixXd& transition() const { return p_; }
  double operator()(Vertex i, Vertex j) const { return p_(Eigen::Index(i), Eigen::Index(j)); }

  /// Graph with w(i, j) = P_ij; its reduced matrix at lambda = 1 is row-stochastic.
  WeightedDigraph transition_graph() const;
  /// Graph with w(i, j) = P_ji, the column-stochastic form.
  WeightedDigraph column_stochastic_graph() const;

  bool irreducible() const;

 private:
  Eigen::MatrixXd p_;
};

/// Pr[X_n = j, X_k not in S for 0 < k < n | X_0 = i], by dynamic programming over
/// the kernel restricted to the complement of S.
double taboo_probability(const MarkovChain& chain, const VertexList& s, Vertex i, Vertex j,
                         std::size_t n);
/// All S x S taboo probabilities at step n (rows/columns follow the order of s).
Eigen::MatrixXd taboo_matrix(const MarkovChain& chain, const VertexList& s, std::size_t n);

struct ReturnIdentityReport {
  double max_by_length = 0.0;  ///< max |R^(n)_ij - taboo^(n)_ij| over n <= |complement| + 1
  double max_total = 0.0;      ///< max |R_ij - sum_n taboo^(n)_ij|
  double max_tail = 0.0;       ///< largest taboo probability at n = |complement| + 2 (should be 0)
};

/// Checks that summed branch weights of each length are taboo probabilities. g must be
/// stochastic (column convention) with S 1-structural and loop-free outside S; the chain
/// is P = M_G^T, so the transition graph on which branches are summed is G^T.
ReturnIdentityReport verify_return_identity(const WeightedDigraph& g, const StructuralSet& s);

/// The S-valued process Y_n observed at successive visits to S.
struct StoppedChainSample {
  std::uint64_t seed = 0;
  std::size_t steps = 0;       ///< transitions of the underlying chain
  VertexList states;           ///< S, defines row/column order of counts
  VertexList visits;           ///< Y_0, Y_1, ...
  Eigen::MatrixXd counts;      ///< counts(a, b) = #{n : Y_n = S[a], Y_{n+1} = S[b]}

  Eigen::MatrixXd empirical() const;  ///< counts with each nonempty row divided by its sum
  nlohmann::json to_json() const;
};

/// Simulates `steps` transitions starting from `start` with a seeded mt19937_64 stream.
/// Throws StuckSimulation if S is never reached.
StoppedChainSample simulate_stopped_chain(const MarkovChain& chain, const VertexList& s,
                                          std::size_t steps, std::uint64_t seed, Vertex start);

/// Runs `streams` independent simulations (seed, seed+1, ...) in parallel and sums the counts.
StoppedChainSample simulate_stopped_chain_parallel(const MarkovChain& chain, const VertexList& s,
                                                   std::size_t steps_per_stream, std::uint64_t seed,
                                                   Vertex start, std::size_t streams);

/// Count-additive merge of two samples over the same S.
StoppedChainSample merge(const StoppedChainSample& a, const StoppedChainSample& b);

/// R_S of the chain's transition graph at lambda = 1 (row-stochastic).
Eigen::MatrixXd reduced_transition(const MarkovChain& chain, const VertexList& s);

struct BandCheck {
  std::size_t entries = 0;     ///< entries in rows with at least one observation
  std::size_t within = 0;      ///< of those, inside the 3-sigma binomial band
  double total_variation = 0;  ///< max over rows of the TV distance to the expected row

  double fraction() const { return entries == 0 ? 1.0 : double(within) / double(entries); }
};

/// Compares empirical frequencies with expected transition probabilities entry by entry.
BandCheck check_bands(const StoppedChainSample& sample, const Eigen::MatrixXd& expected,
                      double sigmas = 3.0);

/// Unique stationary distribution of an irreducible chain (dense solve). Throws Ambiguous otherwise.
Eigen::VectorXd stationary_distribution(const MarkovChain& chain);

/// max |q_S / sum(q_S) - r| where r is stationary for the reduced chain.
double verify_stationary_restriction(const MarkovChain& chain, const VertexList& s);

}  // namespace isograph
