#include "isograph/sparse.hpp"

#include <limits>

#include <omp.h>

namespace isograph {

CsrMatrix CsrMatrix::from_graph(const WeightedDigraph& g, const VertexList& vertices) {
  constexpr auto absent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> pos(g.slot_count(), absent);
  for (std::size_t k = 0; k < vertices.size(); ++k) pos[vertices[k]] = k;

  CsrMatrix a;
  a.rows = vertices.size();
  a.row_start.reserve(a.rows + 1);
  for (Vertex v : vertices) {
    for (const auto& [w, weight] : g.out_edges(v)) {
      if (pos[w] == absent) continue;
      a.column.push_back(pos[w]);
      a.value.push_back(weight.real());
    }
    a.row_start.push_back(a.column.size());
  }
  return a;
}

void spmv_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double sum = 0.0;
    for (std::size_t k = a.row_start[r]; k < a.row_start[r + 1]; ++k) sum += a.value[k] * x[a.column[k]];
    y[r] = sum;
  }
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    const auto row = static_cast<std::size_t>(r);
    for (std::size_t k = a.row_start[row]; k < a.row_start[row + 1]; ++k)
      sum += a.value[k] * x[a.column[k]];
    y[row] = sum;
  }
}

}  // namespace isograph
