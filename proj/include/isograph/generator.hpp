#pragma once

#include <cstdint>

#include "isograph/incremental.hpp"
#include "isograph/rng.hpp"

namespace isograph {

struct GeneratorOptions {
  std::size_t n = 60;
  double avg_out_degree = 2.5;    ///< edges = round(n * avg_out_degree), at least n
  bool require_primitive = true;  ///< otherwise a bare Hamiltonian cycle is acceptable
  std::size_t max_attempts = 100;
};

/// Random column-stochastic loop-free graph: a Hamiltonian cycle on a random vertex
/// order plus random extra edges, raw weights uniform on [0.5, 1.5), each column then
/// rescaled to sum one. Retries with fresh draws until primitive when required; throws
/// GenerationFailed after max_attempts. The result carries the stochastic flag.
WeightedDigraph generate_random_graph(const GeneratorOptions& opts, Rng& rng);
WeightedDigraph generate_random_graph(const GeneratorOptions& opts, std::uint64_t seed);

/// Relative frequencies of op kinds in random deltas.
struct DeltaMix {
  double add_edge = 0.6;
  double remove_edge = 0.2;
  double add_vertex = 0.1;   ///< the new vertex also gets one in-edge and one out-edge (3 ops)
  double remove_vertex = 0.1;
  /// Start with an edge i -> j between complement vertices where j already reaches i
  /// through the complement, so the tail must join S.
  bool force_promotion = false;
};

/// A delta of exactly p ops (p >= 1) that the update session accepts: candidates that
/// break stochasticity or primitivity are redrawn. Throws GenerationFailed after
/// max_attempts candidates.
GraphDelta random_delta(const StoredState& st, std::size_t p, Rng& rng, const DeltaMix& mix = {},
                        std::size_t max_attempts = 200);

}  // namespace isograph
