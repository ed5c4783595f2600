#pragma once

#include <span>
#include <vector>

#include "isograph/digraph.hpp"

namespace isograph {

/// Row-compressed real matrix over an explicit vertex list.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_start{0};
  std::vector<std::size_t> column;
  std::vector<double> value;

  /// Real parts of the adjacency matrix restricted to `vertices` (row/column k <-> vertices[k]).
  static CsrMatrix from_graph(const WeightedDigraph& g, const VertexList& vertices);
  std::size_t nonzeros() const { return value.size(); }
};

/// y = A x, one row per iteration.
void spmv_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
/// y = A x with rows split across OpenMP threads. Each row is reduced in the
/// same order as the serial kernel, so results are bit-identical.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

}  // namespace isograph
