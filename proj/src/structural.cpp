#include "isograph/structural.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace isograph {

VertexList StructuralSet::complement() const {
  VertexList out;
  for (Vertex v = 0; v < depth_of.size(); ++v)
    if (depth_of[v] > 0) out.push_back(v);
  return out;
}

std::vector<std::size_t> StructuralSet::level_sizes() const {
  std::vector<std::size_t> per_depth(static_cast<std::size_t>(max_depth) + 1, 0);
  for (int d : depth_of)
    if (d >= 0) ++per_depth[static_cast<std::size_t>(d)];
  std::partial_sum(per_depth.begin(), per_depth.end(), per_depth.begin());
  return per_depth;
}

VertexList StructuralSet::depth_order() const {
  VertexList order;
  for (Vertex v = 0; v < depth_of.size(); ++v)
    if (depth_of[v] >= 0) order.push_back(v);
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return depth_of[a] < depth_of[b]; });
  return order;
}

namespace {

std::vector<bool> membership(const WeightedDigraph& g, const VertexList& s) {
  std::vector<bool> in_s(g.slot_count(), false);
  for (Vertex v : s) {
    if (!g.is_live(v))
      throw Error(ErrorKind::InvalidInput, "structural set member " + std::to_string(v + 1) +
                                               " is not a vertex of the graph");
    in_s[v] = true;
  }
  return in_s;
}

// Depth-first search restricted to live vertices outside S, loops ignored.
// Invokes on_cycle(stack, from) for every back edge; stack[from..] is the cycle.
// Returns early when on_cycle returns true.
template <class OnCycle>
void dfs_complement(const WeightedDigraph& g, const std::vector<bool>& in_s, OnCycle&& on_cycle) {
  enum : char { white, grey, black };
  std::vector<char> colour(g.slot_count(), white);
  std::vector<Vertex> stack;
  std::vector<std::size_t> position(g.slot_count(), 0);
  struct Frame {
    Vertex v;
    WeightedDigraph::Adjacency::const_iterator next;
  };
  std::vector<Frame> frames;

  for (Vertex root = 0; root < g.slot_count(); ++root) {
    if (!g.is_live(root) || in_s[root] || colour[root] != white) continue;
    colour[root] = grey;
    position[root] = stack.size();
    stack.push_back(root);
    frames.push_back({root, g.out_edges(root).begin()});
    while (!frames.empty()) {
      Frame& top = frames.back();
      if (top.next == g.out_edges(top.v).end()) {
        colour[top.v] = black;
        stack.pop_back();
        frames.pop_back();
        continue;
      }
      const Vertex w = (top.next++)->first;
      if (w == top.v || in_s[w]) continue;
      if (colour[w] == grey) {
        if (on_cycle(stack, position[w])) return;
      } else if (colour[w] == white) {
        colour[w] = grey;
        position[w] = stack.size();
        stack.push_back(w);
        frames.push_back({w, g.out_edges(w).begin()});
      }
    }
  }
}

VertexList find_cycle(const WeightedDigraph& g, const std::vector<bool>& in_s) {
  VertexList cycle;
  dfs_complement(g, in_s, [&](const std::vector<Vertex>& stack, std::size_t from) {
    cycle.assign(stack.begin() + static_cast<std::ptrdiff_t>(from), stack.end());
    cycle.push_back(cycle.front());
    return true;
  });
  return cycle;
}

std::string describe(const StructuralCheck& check) {
  std::string msg;
  if (check.loop_witness)
    msg += "vertex " + std::to_string(*check.loop_witness + 1) +
           " outside S has loop weight equal to lambda";
  if (!check.cycle_witness.empty()) {
    if (!msg.empty()) msg += "; ";
    msg += "cycle avoiding S:";
    for (Vertex v : check.cycle_witness) msg += " " + std::to_string(v + 1);
  }
  return msg;
}

}  // namespace

StructuralCheck validate_structural(const WeightedDigraph& g, const VertexList& s, Complex lambda,
                                    double tol) {
  if (s.empty()) throw Error(ErrorKind::InvalidInput, "structural set must be nonempty");
  const auto in_s = membership(g, s);

  StructuralCheck check;
  for (Vertex v : g.live_vertices()) {
    if (in_s[v] || !g.has_edge(v, v)) continue;
    if (std::abs(g.loop_weight(v) - lambda) <= tol) {
      check.loop_witness = v;
      break;
    }
  }
  check.cycle_witness = find_cycle(g, in_s);
  check.ok = !check.loop_witness && check.cycle_witness.empty();
  return check;
}

StructuralSet compute_depths(const WeightedDigraph& g, const VertexList& s, Complex lambda,
                             double tol) {
  const auto check = validate_structural(g, s, lambda, tol);
  if (!check) throw Error(ErrorKind::NotStructural, describe(check));

  StructuralSet out;
  out.members = s;
  std::sort(out.members.begin(), out.members.end());
  out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
  out.lambda = lambda;
  out.depth_of.assign(g.slot_count(), -1);
  for (Vertex v : out.members) out.depth_of[v] = 0;

  // Post-order over the (acyclic) complement; a vertex's depth is final once all
  // its out-neighbours are.
  std::vector<Vertex> pending;
  for (Vertex root : g.live_vertices()) {
    if (out.depth_of[root] >= 0) continue;
    pending.push_back(root);
    while (!pending.empty()) {
      const Vertex v = pending.back();
      int deepest = 0;
      bool ready = true;
      for (const auto& [w, weight] : g.out_edges(v)) {
        if (w == v) continue;
        if (out.depth_of[w] < 0) {
          pending.push_back(w);
          ready = false;
        } else {
          deepest = std::max(deepest, out.depth_of[w]);
        }
      }
      if (!ready) continue;
      pending.pop_back();
      if (out.depth_of[v] < 0) out.depth_of[v] = deepest + 1;
    }
  }
  out.max_depth = 0;
  for (int d : out.depth_of) out.max_depth = std::max(out.max_depth, d);
  return out;
}

StructuralSet find_structural_set(const WeightedDigraph& g, Complex lambda, double tol, double margin) {
  const auto live = g.live_vertices();
  if (live.empty()) throw Error(ErrorKind::InvalidInput, "graph has no vertices");

  std::vector<bool> in_s(g.slot_count(), false);
  std::vector<bool> forced(g.slot_count(), false);
  for (Vertex v : live) {
    if (std::abs(g.loop_weight(v) - lambda) <= std::max(tol, margin)) in_s[v] = forced[v] = true;
  }

  VertexList added;
  std::vector<std::size_t> hits(g.slot_count());
  for (;;) {
    std::fill(hits.begin(), hits.end(), 0);
    bool any = false;
    dfs_complement(g, in_s, [&](const std::vector<Vertex>& stack, std::size_t from) {
      for (std::size_t k = from; k < stack.size(); ++k) ++hits[stack[k]];
      any = true;
      return false;
    });
    if (!any) break;
    const auto best = static_cast<Vertex>(
        std::max_element(hits.begin(), hits.end()) - hits.begin());
    in_s[best] = true;
    added.push_back(best);
  }

  // Drop members whose removal keeps every cycle covered, latest additions first.
  for (auto it = added.rbegin(); it != added.rend(); ++it) {
    in_s[*it] = false;
    if (!find_cycle(g, in_s).empty()) in_s[*it] = true;
  }

  VertexList s;
  for (Vertex v : live)
    if (in_s[v]) s.push_back(v);
  if (s.empty()) s.push_back(live.front());
  return compute_depths(g, s, lambda, tol);
}

std::optional<int> nilpotency_index(const WeightedDigraph& g, const VertexList& s) {
  const auto in_s = membership(g, s);
  std::vector<bool> current(g.slot_count(), false);
  std::size_t complement_size = 0;
  for (Vertex v : g.live_vertices()) {
    if (!in_s[v]) {
      current[v] = true;
      ++complement_size;
    }
  }
  // current = support of M^k * 1 over the complement: vertices starting a walk of length k.
  int k = 0;
  std::size_t alive = complement_size;
  while (alive != 0) {
    if (static_cast<std::size_t>(k) > complement_size) return std::nullopt;
    std::vector<bool> next(g.slot_count(), false);
    alive = 0;
    for (Vertex j = 0; j < g.slot_count(); ++j) {
      if (!current[j]) continue;
      for (const auto& [i, w] : g.in_edges(j)) {
        if (in_s[i] || next[i]) continue;
        next[i] = true;
        ++alive;
      }
    }
    current = std::move(next);
    ++k;
  }
  return k;
}

}  // namespace isograph
