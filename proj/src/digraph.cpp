#include "isograph/digraph.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace isograph {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::NotStructural: return "not a structural set";
    case ErrorKind::SingularWeight: return "singular weight";
    case ErrorKind::InvalidMode: return "invalid mode";
    case ErrorKind::NotPrimitive: return "not primitive";
    case ErrorKind::IterationFailed: return "iteration failed";
    case ErrorKind::Ambiguous: return "ambiguous";
    case ErrorKind::StuckSimulation: return "stuck simulation";
    case ErrorKind::RejectedDelta: return "rejected delta";
    case ErrorKind::GenerationFailed: return "generation failed";
  }
  return "error";
}

WeightedDigraph::WeightedDigraph(std::size_t n)
    : out_(n), in_(n), live_(n, true), live_count_(n) {}

VertexList WeightedDigraph::live_vertices() const {
  VertexList out;
  out.reserve(live_count_);
  for (Vertex v = 0; v < live_.size(); ++v)
    if (live_[v]) out.push_back(v);
  return out;
}

void WeightedDigraph::check_vertex(Vertex v) const {
  if (!is_live(v))
    throw Error(ErrorKind::InvalidInput, "vertex " + std::to_string(v + 1) + " does not exist");
}

Vertex WeightedDigraph::add_vertex() {
  out_.emplace_back();
  in_.emplace_back();
  live_.push_back(true);
  ++live_count_;
  stochastic_ = false;
  return out_.size() - 1;
}

void WeightedDigraph::remove_vertex(Vertex v) {
  check_vertex(v);
  for (const auto& [j, w] : out_[v]) {
    if (j != v) in_[j].erase(v);
    --edge_count_;
  }
  for (const auto& [i, w] : in_[v]) {
    if (i != v) {
      out_[i].erase(v);
      --edge_count_;
    }
  }
  out_[v].clear();
  in_[v].clear();
  live_[v] = false;
  --live_count_;
  stochastic_ = false;
}

std::vector<Vertex> WeightedDigraph::compact() {
  constexpr Vertex npos = std::numeric_limits<Vertex>::max();
  std::vector<Vertex> remap(slot_count(), npos);
  Vertex next = 0;
  for (Vertex v = 0; v < slot_count(); ++v)
    if (live_[v]) remap[v] = next++;

  WeightedDigraph packed(next);
  for (Vertex i = 0; i < slot_count(); ++i)
    for (const auto& [j, w] : out_[i]) packed.set_weight(remap[i], remap[j], w);
  packed.stochastic_ = stochastic_;
  *this = std::move(packed);
  return remap;
}

void WeightedDigraph::set_weight(Vertex i, Vertex j, Complex w) {
  check_vertex(i);
  check_vertex(j);
  if (w == Complex{}) {
    remove_edge(i, j);
    return;
  }
  auto [it, inserted] = out_[i].insert_or_assign(j, w);
  in_[j].insert_or_assign(i, w);
  if (inserted) ++edge_count_;
  stochastic_ = false;
}

bool WeightedDigraph::remove_edge(Vertex i, Vertex j) {
  check_vertex(i);
  check_vertex(j);
  if (out_[i].erase(j) == 0) return false;
  in_[j].erase(i);
  --edge_count_;
  stochastic_ = false;
  return true;
}

Complex WeightedDigraph::weight(Vertex i, Vertex j) const {
  if (i >= out_.size()) return {};
  auto it = out_[i].find(j);
  return it == out_[i].end() ? Complex{} : it->second;
}

bool WeightedDigraph::has_edge(Vertex i, Vertex j) const {
  return i < out_.size() && out_[i].count(j) != 0;
}

bool WeightedDigraph::has_loops() const {
  for (Vertex v = 0; v < out_.size(); ++v)
    if (out_[v].count(v)) return true;
  return false;
}

double WeightedDigraph::column_sum(Vertex j) const {
  double sum = 0.0;
  for (const auto& [i, w] : in_.at(j)) sum += w.real();
  return sum;
}

void WeightedDigraph::normalize_column(Vertex j) {
  const double sum = column_sum(j);
  if (sum == 0.0) return;
  for (auto& [i, w] : in_.at(j)) {
    w /= sum;
    out_[i][j] = w;
  }
  stochastic_ = false;
}

bool WeightedDigraph::is_column_stochastic(double tol) const {
  for (Vertex j = 0; j < slot_count(); ++j) {
    if (!live_[j]) continue;
    double sum = 0.0;
    for (const auto& [i, w] : in_[j]) {
      if (i == j) return false;
      if (std::abs(w.imag()) > tol || w.real() < 0.0 || w.real() > 1.0 + tol) return false;
      sum += w.real();
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

void WeightedDigraph::mark_stochastic(double tol) {
  if (!is_column_stochastic(tol))
    throw Error(ErrorKind::InvalidMode,
                "graph is not column-stochastic with real weights in [0,1] and no loops");
  stochastic_ = true;
}

Eigen::MatrixXcd WeightedDigraph::dense() const {
  const auto n = static_cast<Eigen::Index>(slot_count());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Vertex i = 0; i < slot_count(); ++i)
    for (const auto& [j, w] : out_[i]) m(Eigen::Index(i), Eigen::Index(j)) = w;
  return m;
}

Eigen::MatrixXd WeightedDigraph::dense_real() const { return dense().real(); }

bool WeightedDigraph::operator==(const WeightedDigraph& other) const {
  return out_ == other.out_ && live_ == other.live_;
}

WeightedDigraph transpose(const WeightedDigraph& g) {
  WeightedDigraph t(g.slot_count());
  for (Vertex v = 0; v < g.slot_count(); ++v)
    if (!g.is_live(v)) t.remove_vertex(v);
  for (Vertex i = 0; i < g.slot_count(); ++i) {
    if (!g.is_live(i)) continue;
    for (const auto& [j, w] : g.out_edges(i)) t.set_weight(j, i, w);
  }
  return t;
}

namespace {

// BFS levels from `root` following out-edges (forward) or in-edges (backward).
std::vector<std::size_t> bfs_levels(const WeightedDigraph& g, Vertex root, bool forward) {
  constexpr auto unseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> level(g.slot_count(), unseen);
  std::queue<Vertex> queue;
  level[root] = 0;
  queue.push(root);
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop();
    const auto& adj = forward ? g.out_edges(u) : g.in_edges(u);
    for (const auto& [v, w] : adj) {
      if (level[v] == unseen) {
        level[v] = level[u] + 1;
        queue.push(v);
      }
    }
  }
  return level;
}

}  // namespace

bool is_strongly_connected(const WeightedDigraph& g) {
  const auto live = g.live_vertices();
  if (live.empty()) return false;
  constexpr auto unseen = std::numeric_limits<std::size_t>::max();
  for (bool forward : {true, false}) {
    const auto level = bfs_levels(g, live.front(), forward);
    for (Vertex v : live)
      if (level[v] == unseen) return false;
  }
  return true;
}

std::size_t period(const WeightedDigraph& g) {
  if (!is_strongly_connected(g)) return 0;
  const auto live = g.live_vertices();
  const auto level = bfs_levels(g, live.front(), true);
  std::size_t d = 0;
  for (Vertex u : live) {
    for (const auto& [v, w] : g.out_edges(u)) {
      const auto diff = static_cast<long long>(level[u]) + 1 - static_cast<long long>(level[v]);
      d = std::gcd(d, static_cast<std::size_t>(diff < 0 ? -diff : diff));
    }
  }
  return d;
}

bool is_primitive(const WeightedDigraph& g) { return period(g) == 1; }

}  // namespace isograph
