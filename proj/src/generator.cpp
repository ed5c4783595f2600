#include "isograph/generator.hpp"

#include <cmath>
#include <numeric>

namespace isograph {

namespace {

Vertex pick(const VertexList& list, Rng& rng) { return list[rng.below(list.size())]; }

bool acceptable(const WeightedDigraph& g) {
  return g.live_count() > 0 && !g.has_loops() && g.is_column_stochastic() && is_primitive(g);
}

}  // namespace

WeightedDigraph generate_random_graph(const GeneratorOptions& opts, Rng& rng) {
  if (opts.n < 2) throw Error(ErrorKind::InvalidInput, "random graphs need at least two vertices");
  const std::size_t max_edges = opts.n * (opts.n - 1);
  const auto target = std::min<std::size_t>(
      max_edges, std::max<std::size_t>(opts.n, std::size_t(std::llround(double(opts.n) * opts.avg_out_degree))));

  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    WeightedDigraph g(opts.n);
    VertexList order(opts.n);
    std::iota(order.begin(), order.end(), Vertex{0});
    for (std::size_t k = opts.n - 1; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
    for (std::size_t k = 0; k < opts.n; ++k)
      g.set_weight(order[k], order[(k + 1) % opts.n], rng.uniform(0.5, 1.5));
    while (g.edge_count() < target) {
      const Vertex u = rng.below(opts.n);
      const Vertex v = rng.below(opts.n);
      if (u != v && !g.has_edge(u, v)) g.set_weight(u, v, rng.uniform(0.5, 1.5));
    }
    for (Vertex v = 0; v < opts.n; ++v) g.normalize_column(v);
    if (opts.require_primitive && !is_primitive(g)) continue;
    g.mark_stochastic();
    return g;
  }
  throw Error(ErrorKind::GenerationFailed, "no primitive graph with " + std::to_string(opts.n) +
                                               " vertices and " + std::to_string(target) + " edges after " +
                                               std::to_string(opts.max_attempts) + " attempts");
}

WeightedDigraph generate_random_graph(const GeneratorOptions& opts, std::uint64_t seed) {
  Rng rng(seed);
  return generate_random_graph(opts, rng);
}

GraphDelta random_delta(const StoredState& st, std::size_t p, Rng& rng, const DeltaMix& mix,
                        std::size_t max_attempts) {
  if (p == 0) throw Error(ErrorKind::InvalidInput, "a random delta needs at least one op");
  const double total = mix.add_edge + mix.remove_edge + mix.add_vertex + mix.remove_vertex;
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidInput, "delta mix has no positive weight");

  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    WeightedDigraph g = st.graph;
    GraphDelta d;
    auto push = [&](const DeltaOp& op) {
      apply_graph_op(g, op);
      d.ops.push_back(op);
    };

    if (mix.force_promotion) {
      std::vector<std::pair<Vertex, Vertex>> pairs;
      for (const auto& b : st.branches.all()) {
        const Vertex j = b.front(), i = b.back();
        if (i != j && !st.structural.contains(i) && !st.structural.contains(j) && !g.has_edge(i, j))
          pairs.emplace_back(i, j);
      }
      if (pairs.empty()) throw Error(ErrorKind::GenerationFailed, "no complement branch to close into a cycle");
      const auto [i, j] = pairs[rng.below(pairs.size())];
      push(DeltaOp::add_edge(i, j, rng.uniform(0.5, 1.5)));
    }

    bool stuck = false;
    while (d.size() < p && !stuck) {
      const auto live = g.live_vertices();
      const bool room_for_vertex = p - d.size() >= 3;
      double x = rng.uniform(0.0, total);
      DeltaOp::Kind kind = DeltaOp::Kind::RemoveVertex;
      if ((x -= mix.add_edge) < 0.0)
        kind = DeltaOp::Kind::AddEdge;
      else if ((x -= mix.remove_edge) < 0.0)
        kind = DeltaOp::Kind::RemoveEdge;
      else if ((x -= mix.add_vertex) < 0.0)
        kind = DeltaOp::Kind::AddVertex;
      if ((kind == DeltaOp::Kind::AddVertex && !room_for_vertex) ||
          (kind == DeltaOp::Kind::RemoveVertex && live.size() <= 3))
        kind = DeltaOp::Kind::AddEdge;

      bool done = false;
      for (int tries = 0; tries < 50 && !done; ++tries) {
        switch (kind) {
          case DeltaOp::Kind::AddEdge: {
            const Vertex u = pick(live, rng), v = pick(live, rng);
            if (u != v && !g.has_edge(u, v)) {
              push(DeltaOp::add_edge(u, v, rng.uniform(0.5, 1.5)));
              done = true;
            }
            break;
          }
          case DeltaOp::Kind::RemoveEdge: {
            const Vertex u = pick(live, rng);
            const auto& out = g.out_edges(u);
            if (out.size() < 2) break;
            auto it = out.begin();
            std::advance(it, std::ptrdiff_t(rng.below(out.size())));
            if (g.in_edges(it->first).size() >= 2) {
              push(DeltaOp::remove_edge(u, it->first));
              done = true;
            }
            break;
          }
          case DeltaOp::Kind::AddVertex: {
            const Vertex u = pick(live, rng), v = pick(live, rng);
            const Vertex fresh = g.slot_count();
            push(DeltaOp::add_vertex());
            push(DeltaOp::add_edge(u, fresh, rng.uniform(0.5, 1.5)));
            push(DeltaOp::add_edge(fresh, v, rng.uniform(0.5, 1.5)));
            done = true;
            break;
          }
          case DeltaOp::Kind::RemoveVertex:
            push(DeltaOp::remove_vertex(pick(live, rng)));
            done = true;
            break;
        }
      }
      stuck = !done;
    }
    if (!stuck && d.size() == p && acceptable(g)) return d;
  }
  throw Error(ErrorKind::GenerationFailed,
              "no acceptable delta of " + std::to_string(p) + " ops after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace isograph
