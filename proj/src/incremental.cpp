#include "isograph/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>

#include "isograph/graph_io.hpp"

namespace isograph {

namespace {

const char* op_name(DeltaOp::Kind k) {
  switch (k) {
    case DeltaOp::Kind::AddVertex: return "add_vertex";
    case DeltaOp::Kind::RemoveVertex: return "remove_vertex";
    case DeltaOp::Kind::AddEdge: return "add_edge";
    case DeltaOp::Kind::RemoveEdge: return "remove_edge";
  }
  return "?";
}

Vertex one_based(const nlohmann::json& j, const char* key) {
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw Error(ErrorKind::InvalidInput, std::string("vertex ids are 1-based: ") + key);
  return Vertex(v - 1);
}

[[noreturn]] void reject(const std::string& why) { throw Error(ErrorKind::RejectedDelta, why); }

std::string vname(Vertex v) { return std::to_string(v + 1); }

double l1_residual(const WeightedDigraph& g, const EigenPair& v) {
  double r = 0.0;
  for (std::size_t k = 0; k < v.vertices.size(); ++k) {
    Complex sum{};
    for (const auto& [j, w] : g.out_edges(v.vertices[k])) sum += w * v.at(j);
    r += std::abs(sum - v.vector(Eigen::Index(k)));
  }
  return r;
}

std::vector<Branch> copy_bucket(const BranchSet::Bucket& b) {
  std::vector<Branch> out;
  out.reserve(b.size());
  for (const Branch* p : b) out.push_back(*p);
  return out;
}

bool simple_or_closed(const VertexList& v) {
  std::vector<Vertex> sorted(v.begin(), v.end() - (v.size() > 1 && v.front() == v.back() ? 1 : 0));
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

void solve_eigen(StoredState& st, const UpdateOptions& opts, const EigenPair* warm, UpdateLog* log) {
  const auto& s = st.structural;
  const Eigen::MatrixXd block = st.extended.structural_block(s.members);
  PowerIterationOptions po = opts.power;
  if (warm != nullptr && warm->vector.size() > 0) {
    Eigen::VectorXd init(Eigen::Index(s.size()));
    double known = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      init(Eigen::Index(k)) = std::max(0.0, warm->at(s.members[k]).real());
      if (init(Eigen::Index(k)) > 0.0) {
        known += init(Eigen::Index(k));
        ++count;
      }
    }
    if (count > 0) {
      const double fill = known / double(count);
      for (Eigen::Index k = 0; k < init.size(); ++k)
        if (!(init(k) > 0.0)) init(k) = fill;
      po.initial = init;
    }
  }
  if (period(st.graph) > 1) po.lazy = true;
  auto res = power_iteration(block, po);
  std::size_t iterations = res.iterations;
  if (!res.converged) {
    po.lazy = true;
    res = power_iteration(block, po);
    iterations += res.iterations;
  }
  st.reduced = res.pair;
  st.reduced.vertices = s.members;
  st.reduced.lambda = 1.0;
  st.dominant = lift_eigenvector(st.graph, s, 1.0, res.pair.vector, Normalization::L1Positive);
  st.power_iterations = iterations;
  if (log != nullptr) {
    log->power_iterations = iterations;
    log->power_converged = res.converged;
    log->eigen_residual = l1_residual(st.graph, st.dominant);
  }
}

void validate_graph(const WeightedDigraph& g, double tol) {
  if (g.live_count() == 0) reject("the graph has no vertices left");
  if (g.has_loops()) reject("the graph has a loop");
  for (Vertex v : g.live_vertices()) {
    const double sum = g.column_sum(v);
    if (std::abs(sum - 1.0) > tol)
      reject("column " + vname(v) + " sums to " + std::to_string(sum) + " instead of one");
  }
  if (!is_strongly_connected(g)) reject("the graph is not strongly connected");
}

void rebuild_from(StoredState& st, const VertexList& s) {
  st.structural = compute_depths(st.graph, s, 1.0);
  st.branches = enumerate_branches(st.graph, st.structural);
  st.extended = extended_reduced_matrix(st.graph, st.structural, st.branches);
}

}  // namespace

// ---------------------------------------------------------------- delta I/O

nlohmann::json DeltaOp::to_json() const {
  nlohmann::json j = {{"op", op_name(kind)}};
  switch (kind) {
    case Kind::AddVertex: break;
    case Kind::RemoveVertex: j["vertex"] = i + 1; break;
    case Kind::AddEdge:
      j["from"] = i + 1;
      j["to"] = this->j + 1;
      j["weight"] = weight;
      break;
    case Kind::RemoveEdge:
      j["from"] = i + 1;
      j["to"] = this->j + 1;
      break;
  }
  return j;
}

DeltaOp DeltaOp::from_json(const nlohmann::json& j) {
  const auto name = j.at("op").get<std::string>();
  if (name == "add_vertex") return add_vertex();
  if (name == "remove_vertex") return remove_vertex(one_based(j, "vertex"));
  if (name == "add_edge") return add_edge(one_based(j, "from"), one_based(j, "to"), j.at("weight").get<double>());
  if (name == "remove_edge") return remove_edge(one_based(j, "from"), one_based(j, "to"));
  throw Error(ErrorKind::InvalidInput, "unknown delta op " + name);
}

nlohmann::json GraphDelta::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& op : ops) list.push_back(op.to_json());
  return {{"ops", std::move(list)}};
}

GraphDelta GraphDelta::from_json(const nlohmann::json& j) {
  GraphDelta d;
  const auto& list = j.is_array() ? j : j.at("ops");
  for (const auto& op : list) d.ops.push_back(DeltaOp::from_json(op));
  return d;
}

GraphDelta load_delta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
  try {
    return GraphDelta::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, path.string() + ": " + e.what());
  }
}

void save_delta(const std::filesystem::path& path, const GraphDelta& delta) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
  out << delta.to_json().dump(2) << '\n';
}

// ---------------------------------------------------------------- graph ops

void check_op(const WeightedDigraph& g, const DeltaOp& op) {
  switch (op.kind) {
    case DeltaOp::Kind::AddVertex: return;
    case DeltaOp::Kind::RemoveVertex:
      if (!g.is_live(op.i)) reject("remove_vertex: vertex " + vname(op.i) + " does not exist");
      return;
    case DeltaOp::Kind::AddEdge:
      if (!g.is_live(op.i) || !g.is_live(op.j))
        reject("add_edge " + vname(op.i) + "->" + vname(op.j) + ": endpoint does not exist");
      if (op.i == op.j) reject("add_edge " + vname(op.i) + "->" + vname(op.j) + ": loops are not allowed");
      if (g.has_edge(op.i, op.j)) reject("add_edge " + vname(op.i) + "->" + vname(op.j) + ": edge exists");
      if (!(op.weight > 0.0) || !std::isfinite(op.weight))
        reject("add_edge " + vname(op.i) + "->" + vname(op.j) + ": weight must be positive");
      return;
    case DeltaOp::Kind::RemoveEdge:
      if (!g.is_live(op.i) || !g.is_live(op.j) || !g.has_edge(op.i, op.j))
        reject("remove_edge " + vname(op.i) + "->" + vname(op.j) + ": no such edge");
      return;
  }
}

Vertex apply_graph_op(WeightedDigraph& g, const DeltaOp& op) {
  check_op(g, op);
  switch (op.kind) {
    case DeltaOp::Kind::AddVertex: return g.add_vertex();
    case DeltaOp::Kind::RemoveVertex: {
      VertexList columns;
      for (const auto& [x, w] : g.out_edges(op.i))
        if (x != op.i) columns.push_back(x);
      g.remove_vertex(op.i);
      for (Vertex x : columns) g.normalize_column(x);
      return op.i;
    }
    case DeltaOp::Kind::AddEdge:
      g.set_weight(op.i, op.j, op.weight);
      g.normalize_column(op.j);
      return op.i;
    case DeltaOp::Kind::RemoveEdge:
      g.remove_edge(op.i, op.j);
      g.normalize_column(op.j);
      return op.i;
  }
  return op.i;
}

// ---------------------------------------------------------------- stored state

StoredState StoredState::build(WeightedDigraph g, const UpdateOptions& opts) {
  g.mark_stochastic(opts.stochastic_tol);
  if (!is_strongly_connected(g)) throw Error(ErrorKind::NotPrimitive, "graph is not strongly connected");
  const auto s = find_structural_set(g, 1.0);
  return build(std::move(g), s.members, opts);
}

StoredState StoredState::build(WeightedDigraph g, const VertexList& s, const UpdateOptions& opts) {
  g.mark_stochastic(opts.stochastic_tol);
  if (!is_strongly_connected(g)) throw Error(ErrorKind::NotPrimitive, "graph is not strongly connected");
  StoredState st;
  st.graph = std::move(g);
  rebuild_from(st, s);
  solve_eigen(st, opts, nullptr, nullptr);
  return st;
}

Measurements StoredState::measurements(std::size_t ell, std::size_t p) const {
  Measurements m;
  m.n = graph.live_count();
  m.s = structural.size();
  m.k = std::size_t(structural.max_depth);
  m.m = branches.max_branches_at_vertex();
  m.ell = ell;
  m.p = p;
  return m;
}

void StoredState::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const nlohmann::json& j) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + (dir / name).string());
    out << j.dump(1) << '\n';
  };
  {
    std::ofstream out(dir / "graph.txt");
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + (dir / "graph.txt").string());
    write_edge_list(out, graph);
  }
  nlohmann::json members = nlohmann::json::array();
  for (Vertex v : structural.members) members.push_back(v + 1);
  nlohmann::json dead = nlohmann::json::array();
  for (Vertex v = 0; v < graph.slot_count(); ++v)
    if (!graph.is_live(v)) dead.push_back(v + 1);
  write("state.json", {{"slots", graph.slot_count()},
                       {"dead", dead},
                       {"structural_set", members},
                       {"lambda", complex_to_json(structural.lambda)},
                       {"power_iterations", power_iterations}});
  write("branches.json", branches.to_json());
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < extended.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < extended.entries.cols(); ++j)
      if (extended.entries(i, j) != 0.0) entries.push_back({i + 1, j + 1, extended.entries(i, j)});
  write("extended_reduced.json", {{"n", extended.entries.rows()}, {"entries", entries}});
  write("reduced_eigenvector.json", reduced.to_json());
  write("eigenvector.json", dominant.to_json());
}

StoredState StoredState::load(const std::filesystem::path& dir) {
  auto read = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + (dir / name).string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidInput, (dir / name).string() + ": " + e.what());
    }
  };
  StoredState st;
  {
    std::ifstream in(dir / "graph.txt");
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + (dir / "graph.txt").string());
    st.graph = read_edge_list(in);
  }
  try {
    const auto state = read("state.json");
    if (state.at("slots").get<std::size_t>() != st.graph.slot_count())
      throw Error(ErrorKind::InvalidInput, "state.json and graph.txt disagree on the vertex count");
    for (const auto& d : state.at("dead")) st.graph.remove_vertex(d.get<Vertex>() - 1);
    VertexList members;
    for (const auto& v : state.at("structural_set")) members.push_back(v.get<Vertex>() - 1);
    std::sort(members.begin(), members.end());
    st.power_iterations = state.value("power_iterations", std::size_t{0});

    // The hierarchy is derived data; a set that is not structural still loads so that
    // check_consistency can name the problem.
    try {
      st.structural = compute_depths(st.graph, members, 1.0);
    } catch (const Error&) {
      st.structural.members = members;
      st.structural.lambda = 1.0;
      st.structural.depth_of.assign(st.graph.slot_count(), 1);
      for (Vertex v = 0; v < st.graph.slot_count(); ++v)
        if (!st.graph.is_live(v)) st.structural.depth_of[v] = -1;
      for (Vertex v : members)
        if (v < st.structural.depth_of.size()) st.structural.depth_of[v] = 0;
    }
    st.branches = BranchSet::from_json(read("branches.json"));
    const auto ext = read("extended_reduced.json");
    const auto n = ext.at("n").get<Eigen::Index>();
    st.extended.entries = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : ext.at("entries"))
      st.extended.entries(e.at(0).get<Eigen::Index>() - 1, e.at(1).get<Eigen::Index>() - 1) = e.at(2).get<double>();
    st.reduced = EigenPair::from_json(read("reduced_eigenvector.json"));
    st.dominant = EigenPair::from_json(read("eigenvector.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, dir.string() + ": " + e.what());
  }
  if (st.graph.is_column_stochastic() && !st.graph.has_loops()) st.graph.mark_stochastic();
  return st;
}

std::vector<ConsistencyIssue> check_consistency(const StoredState& st, double tol, double eigen_tol) {
  std::vector<ConsistencyIssue> issues;
  auto fail = [&](const char* name, std::string detail) { issues.push_back({name, std::move(detail)}); };
  const auto& g = st.graph;

  if (!g.is_column_stochastic() || g.has_loops()) fail("graph-stochastic", "columns do not sum to one or a loop exists");
  if (!is_strongly_connected(g)) fail("graph-irreducible", "graph is not strongly connected");

  bool structural_ok = false;
  StructuralSet fresh;
  try {
    const auto check = validate_structural(g, st.structural.members, 1.0);
    if (!check) {
      std::string witness;
      for (Vertex v : check.cycle_witness) witness += (witness.empty() ? "" : " ") + vname(v);
      fail("structural-set", "a cycle avoids S: " + witness);
    } else {
      fresh = compute_depths(g, st.structural.members, 1.0);
      structural_ok = true;
    }
  } catch (const Error& e) {
    fail("structural-set", e.what());
  }
  if (!structural_ok) return issues;

  if (fresh.depth_of != st.structural.depth_of || fresh.max_depth != st.structural.max_depth)
    fail("depth-hierarchy", "stored depths differ from a recomputation");

  const auto branches = enumerate_branches(g, fresh);
  if (!(branches == st.branches))
    fail("branch-set", "stored " + std::to_string(st.branches.size()) + " branches, recomputed " +
                           std::to_string(branches.size()));

  const auto ext = extended_reduced_matrix(g, fresh, branches);
  if (ext.entries.rows() != st.extended.entries.rows() || ext.entries.cols() != st.extended.entries.cols()) {
    fail("extended-reduced", "matrix has the wrong shape");
  } else {
    const double diff = (ext.entries - st.extended.entries).cwiseAbs().maxCoeff();
    if (diff > tol) fail("extended-reduced", "max entry difference " + std::to_string(diff));
  }

  if (st.reduced.vertices != fresh.members) {
    fail("reduced-eigenvector", "indexed by a different vertex set than S");
  } else {
    const Eigen::MatrixXd block = ext.structural_block(fresh.members);
    const Eigen::VectorXd u = st.reduced.vector.real();
    const double r = (block * u - u).lpNorm<1>() / std::max(u.lpNorm<1>(), 1e-300);
    if (r > eigen_tol) fail("reduced-eigenvector", "residual " + std::to_string(r));
  }

  if (st.dominant.vertices != g.live_vertices()) {
    fail("dominant-eigenvector", "indexed by a different vertex set than the live vertices");
  } else {
    const double r = l1_residual(g, st.dominant) / std::max(st.dominant.vector.cwiseAbs().sum(), 1e-300);
    if (r > eigen_tol) fail("dominant-eigenvector", "residual " + std::to_string(r));
    if (st.reduced.vertices == fresh.members) {
      const auto lifted = lift_eigenvector(g, fresh, 1.0, st.reduced.vector, Normalization::L1Positive);
      const double d = (lifted.vector - st.dominant.vector).cwiseAbs().maxCoeff();
      if (d > eigen_tol) fail("dominant-eigenvector", "differs from the lifted reduced vector by " + std::to_string(d));
    }
  }
  return issues;
}

// ---------------------------------------------------------------- session

double UpdateLog::step3() const {
  double c = 0.0;
  for (const auto& r : ops) c += r.step3;
  return c;
}
double UpdateLog::step4() const {
  double c = 0.0;
  for (const auto& r : ops) c += r.step4;
  return c;
}
double UpdateLog::step4_reweight() const {
  double c = 0.0;
  for (const auto& r : ops) c += r.step4_reweight;
  return c;
}
std::size_t UpdateLog::promotions() const {
  std::size_t c = 0;
  for (const auto& r : ops) c += r.promoted ? 1 : 0;
  return c;
}
std::size_t UpdateLog::skipped() const {
  std::size_t c = 0;
  for (const auto& r : ops) c += r.skipped;
  return c;
}

UpdateSession::UpdateSession(StoredState base, UpdateOptions opts) : state_(std::move(base)), opts_(std::move(opts)) {}

void UpdateSession::apply_op(StoredState& st, const DeltaOp& op, OpRecord& rec) const {
  auto& g = st.graph;
  auto& s = st.structural;
  auto& b = st.branches;
  auto& r = st.extended.entries;
  rec.op = op;
  check_op(g, op);

  if (op.kind == DeltaOp::Kind::AddVertex) {
    rec.created = g.add_vertex();
    s.depth_of.push_back(1);
    const auto n = r.rows();
    r.conservativeResize(n + 1, n + 1);
    r.row(n).setZero();
    r.col(n).setZero();
    return;
  }

  auto add_weight = [&](const Branch& br, double sign) {
    r(Eigen::Index(br.front()), Eigen::Index(br.back())) += sign * path_product(g, br);
  };

  // Branches that disappear with the op, and columns that get rescaled.
  std::set<Branch> doomed;
  VertexList columns;
  if (op.kind == DeltaOp::Kind::RemoveEdge) {
    columns.push_back(op.j);
    for (const auto* bucket : {&b.from(op.i), &b.through(op.i)})
      for (const Branch* p : *bucket)
        if (p->uses_edge(op.i, op.j)) doomed.insert(*p);
  } else if (op.kind == DeltaOp::Kind::RemoveVertex) {
    for (const auto& [x, w] : g.out_edges(op.i))
      if (x != op.i) columns.push_back(x);
    for (const auto* bucket : {&b.from(op.i), &b.to(op.i), &b.through(op.i)})
      for (const Branch* p : *bucket) doomed.insert(*p);
  } else {
    columns.push_back(op.j);
  }

  std::set<Branch> reweight;
  for (Vertex c : columns)
    for (const auto* bucket : {&b.to(c), &b.through(c)})
      for (const Branch* p : *bucket)
        if (!doomed.count(*p)) reweight.insert(*p);

  for (const auto& br : doomed) {
    add_weight(br, -1.0);
    rec.step4 += double(br.length());
  }
  for (const auto& br : reweight) {
    add_weight(br, -1.0);
    rec.step4 += double(br.length());
    rec.step4_reweight += double(br.length());
  }

  // Step 1.
  apply_graph_op(g, op);

  // Step 3, deletions.
  for (const auto& br : doomed) {
    b.erase(br);
    rec.step3 += double(br.length());
    ++rec.deleted;
  }

  if (op.kind == DeltaOp::Kind::RemoveVertex) {
    const auto v = op.i;
    if (s.contains(v)) s.members.erase(std::find(s.members.begin(), s.members.end(), v));
    s.depth_of[v] = -1;
  }

  if (op.kind == DeltaOp::Kind::AddEdge) {
    const Vertex i = op.i;
    const Vertex j = op.j;
    // Step 2: a branch j ~> i through the complement would close a cycle avoiding S.
    if (!s.contains(i) && !s.contains(j) && !b.between(j, i).empty()) {
      rec.promoted = true;
      s.members.insert(std::upper_bound(s.members.begin(), s.members.end(), i), i);
      s.depth_of[i] = 0;
      for (const auto& br : copy_bucket(b.through(i))) {
        if (reweight.erase(br) == 0) {
          add_weight(br, -1.0);
          rec.step4 += double(br.length());
        }
        b.erase(br);
        rec.step3 += double(br.length());
        ++rec.deleted;
      }
    }
    // Step 3, additions: every branch prefix ending at i joined to every suffix starting at j.
    std::vector<Branch> prefixes{Branch{{i}}};
    if (!s.contains(i))
      for (auto& br : copy_bucket(b.to(i))) prefixes.push_back(std::move(br));
    std::vector<Branch> suffixes{Branch{{j}}};
    if (!s.contains(j))
      for (auto& br : copy_bucket(b.from(j))) suffixes.push_back(std::move(br));
    for (const auto& pre : prefixes) {
      for (const auto& suf : suffixes) {
        Branch joined{pre.vertices};
        joined.vertices.insert(joined.vertices.end(), suf.vertices.begin(), suf.vertices.end());
        if (!simple_or_closed(joined.vertices)) {
          ++rec.skipped;
          continue;
        }
        if (b.insert(joined)) {
          add_weight(joined, 1.0);
          rec.step3 += double(joined.length());
          rec.step4 += double(joined.length());
          ++rec.added;
        }
      }
    }
  }

  for (const auto& br : reweight) {
    if (!b.contains(br)) continue;
    add_weight(br, 1.0);
    rec.step4 += double(br.length());
    rec.step4_reweight += double(br.length());
    ++rec.reweighted;
  }

  if (op.kind == DeltaOp::Kind::RemoveVertex) {
    r.row(Eigen::Index(op.i)).setZero();
    r.col(Eigen::Index(op.i)).setZero();
  }
}

void UpdateSession::finish(StoredState& st, UpdateLog& log) const {
  validate_graph(st.graph, opts_.stochastic_tol);
  st.graph.mark_stochastic(opts_.stochastic_tol);
  bool fallback = st.structural.members.empty();
  if (!fallback) {
    try {
      st.structural = compute_depths(st.graph, st.structural.members, 1.0);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotStructural) throw;
      fallback = true;
    }
  }
  if (fallback) {
    log.structural_fallback = true;
    rebuild_from(st, find_structural_set(st.graph, 1.0).members);
    return;
  }
  // Subtract-then-add leaves rounding residue: an entry with no branches is exactly zero.
  auto& r = st.extended.entries;
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      if (r(i, j) != 0.0 && (r(i, j) < 0.0 || st.branches.between(Vertex(i), Vertex(j)).empty())) r(i, j) = 0.0;
}

void UpdateSession::apply(const GraphDelta& delta) {
  if (delta.size() > opts_.max_ops)
    reject("delta has " + std::to_string(delta.size()) + " ops, more than the limit " + std::to_string(opts_.max_ops));
  // Dry run on the graph alone, so a rejected delta never touches the stored state.
  WeightedDigraph trial = state_.graph;
  for (const auto& op : delta.ops) {
    check_op(trial, op);
    apply_graph_op(trial, op);
  }
  validate_graph(trial, opts_.stochastic_tol);

  const WeightedDigraph before = state_.graph;
  const VertexList members = state_.structural.members;
  const EigenPair reduced = state_.reduced, dominant = state_.dominant;
  UpdateLog log = log_;
  try {
    for (const auto& op : delta.ops) {
      OpRecord rec;
      apply_op(state_, op, rec);
      log.ops.push_back(rec);
    }
    finish(state_, log);
  } catch (...) {
    state_.graph = before;
    rebuild_from(state_, members);
    state_.reduced = reduced;
    state_.dominant = dominant;
    throw;
  }
  log_ = std::move(log);
}

void UpdateSession::refresh_eigen() {
  const EigenPair warm = state_.reduced;
  solve_eigen(state_, opts_, &warm, &log_);
}

UpdateOutcome update(const StoredState& base, const GraphDelta& delta, const UpdateOptions& opts) {
  UpdateSession session(base, opts);
  session.apply(delta);
  session.refresh_eigen();
  UpdateLog log = session.log();
  return {std::move(session).take(), std::move(log)};
}

StoredState scratch_update(const StoredState& base, const GraphDelta& delta, const UpdateOptions& opts) {
  if (delta.size() > opts.max_ops)
    reject("delta has " + std::to_string(delta.size()) + " ops, more than the limit " + std::to_string(opts.max_ops));
  WeightedDigraph g = base.graph;
  std::vector<bool> in_s(g.slot_count(), false);
  for (Vertex v : base.structural.members) in_s[v] = true;

  // Whether `from` reaches `to` using complement vertices only (both ends included).
  auto reaches_outside = [&](Vertex from, Vertex to) {
    std::vector<bool> seen(g.slot_count(), false);
    std::deque<Vertex> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
      const Vertex u = queue.front();
      queue.pop_front();
      if (u == to) return true;
      for (const auto& [x, w] : g.out_edges(u))
        if (!seen[x] && !in_s[x]) {
          seen[x] = true;
          queue.push_back(x);
        }
    }
    return false;
  };

  for (const auto& op : delta.ops) {
    check_op(g, op);
    if (op.kind == DeltaOp::Kind::AddEdge && !in_s[op.i] && !in_s[op.j] && reaches_outside(op.j, op.i))
      in_s[op.i] = true;
    apply_graph_op(g, op);
    if (op.kind == DeltaOp::Kind::AddVertex) in_s.push_back(false);
    if (op.kind == DeltaOp::Kind::RemoveVertex) in_s[op.i] = false;
  }
  validate_graph(g, opts.stochastic_tol);

  VertexList members;
  for (Vertex v = 0; v < in_s.size(); ++v)
    if (in_s[v]) members.push_back(v);
  if (members.empty() || !validate_structural(g, members, 1.0)) members = find_structural_set(g, 1.0).members;
  return StoredState::build(std::move(g), members, opts);
}

CostReport cost_report(const StoredState& before, const StoredState& after, const GraphDelta& delta,
                       const UpdateLog& log, std::size_t ell, double ratio) {
  CostReport c;
  c.before = before.measurements(ell, delta.size());
  c.after = after.measurements(ell, delta.size());
  const double n = double(c.after.n);
  const double s = double(c.after.s);
  c.step3 = log.step3();
  c.step4 = log.step4();
  c.step4_reweight = log.step4_reweight();
  c.step5 = double(ell) * s * s * s;
  const auto levels = after.structural.level_sizes();
  c.step6 = lift_cost(levels);
  c.baseline = double(ell) * n * n * n;
  c.savings = 1.0 - (c.step3 + c.step4 + c.step5 + c.step6) / c.baseline;

  const double k = double(std::max(c.before.k, c.after.k));
  const double m = double(std::max(c.before.m, c.after.m));
  c.branch_bound = double(delta.size()) * (k + 1.0) * m;
  c.lift_bound = double(c.after.k) * n * n / 2.0;
  c.lift_bound_claimed = double(c.before.k + delta.size()) * n * n / 2.0;
  c.depth_within_k_plus_p = c.after.k <= c.before.k + delta.size();
  c.conditions = scale_conditions(c.before, ratio);

  c.ops_applied = log.ops.size();
  c.promotions = log.promotions();
  c.structural_fallback = log.structural_fallback;
  c.power_iterations = log.power_iterations;
  c.eigen_residual = log.eigen_residual;
  return c;
}

}  // namespace isograph
