#include "derive_fixtures.hpp"

#include <cmath>
#include <limits>

#include "oracles.hpp"

using nlohmann::json;
using oracle::Cplx;

namespace {

Eigen::MatrixXcd from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (auto [i, j, w] : edges) m(i - 1, j - 1) = w;
  return m;
}

std::vector<bool> members(int n, std::initializer_list<int> s) {
  std::vector<bool> in(std::size_t(n), false);
  for (int v : s) in[std::size_t(v - 1)] = true;
  return in;
}

json edges_json(const Eigen::MatrixXcd& m) {
  json e = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != Cplx(0.0)) e.push_back({i + 1, j + 1, m(i, j).real(), m(i, j).imag()});
  return {{"n", m.rows()}, {"edges", e}};
}

json paths_json(const std::set<oracle::Path>& paths) {
  json out = json::array();
  for (const auto& p : paths) {
    json q = json::array();
    for (int v : p) q.push_back(v + 1);
    out.push_back(q);
  }
  return out;
}

json real_matrix(const Eigen::MatrixXd& a) {
  json out = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    out.push_back(row);
  }
  return out;
}

json real_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Cplx branch_weight(const Eigen::MatrixXcd& m, const oracle::Path& p, Cplx lambda) {
  Cplx w = m(p[0], p[1]);
  for (std::size_t k = 1; k + 1 < p.size(); ++k) w *= m(p[k], p[k + 1]) / (lambda - m(p[k], p[k]));
  return w;
}

std::vector<int> depth_list(const Eigen::MatrixXcd& m, const std::vector<bool>& in_s) {
  return *oracle::depths(m, in_s);
}

/// Applies one edge op with column renormalization to a dense column-stochastic matrix.
void add_edge(Eigen::MatrixXcd& m, int i, int j, double w) {
  m(i - 1, j - 1) = w;
  m.col(j - 1) /= m.col(j - 1).sum();
}
void remove_edge(Eigen::MatrixXcd& m, int i, int j) {
  m(i - 1, j - 1) = 0.0;
  m.col(j - 1) /= m.col(j - 1).sum();
}

/// Whether `from` reaches `to` through vertices outside S (ends included).
bool reaches_outside(const Eigen::MatrixXcd& m, const std::vector<bool>& in_s, int from, int to) {
  std::vector<bool> seen(std::size_t(m.rows()), false);
  std::vector<int> stack{from};
  seen[std::size_t(from)] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    for (int v = 0; v < m.rows(); ++v)
      if (m(u, v) != Cplx(0.0) && !seen[std::size_t(v)] && !in_s[std::size_t(v)]) {
        seen[std::size_t(v)] = true;
        stack.push_back(v);
      }
  }
  return false;
}

json incremental_case(const std::string& name, Eigen::MatrixXcd m, std::vector<bool> in_s,
                      const std::vector<std::tuple<std::string, int, int, double>>& ops) {
  json c;
  c["name"] = name;
  c["graph"] = edges_json(m);
  json s0 = json::array();
  for (int v = 0; v < m.rows(); ++v)
    if (in_s[std::size_t(v)]) s0.push_back(v + 1);
  c["structural_set"] = s0;
  const auto before = oracle::branches(m, in_s);
  json delta = json::array();
  for (const auto& [op, i, j, w] : ops) {
    if (op == "add_edge") {
      if (!in_s[std::size_t(i - 1)] && !in_s[std::size_t(j - 1)] && reaches_outside(m, in_s, j - 1, i - 1))
        in_s[std::size_t(i - 1)] = true;
      add_edge(m, i, j, w);
      delta.push_back({{"op", op}, {"from", i}, {"to", j}, {"weight", w}});
    } else {
      remove_edge(m, i, j);
      delta.push_back({{"op", op}, {"from", i}, {"to", j}});
    }
  }
  c["delta"] = {{"ops", delta}};
  json s1 = json::array();
  for (int v = 0; v < m.rows(); ++v)
    if (in_s[std::size_t(v)]) s1.push_back(v + 1);
  const auto after = oracle::branches(m, in_s);
  c["expected"] = {{"structural_set", s1},
                   {"branches", paths_json(after)},
                   {"extended", real_matrix(oracle::extended_reduced(m, in_s))},
                   {"dominant", real_vector(oracle::perron(m.real()))}};
  std::set<oracle::Path> removed, added;
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::inserter(removed, removed.end()));
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::inserter(added, added.end()));
  c["expected"]["removed_branches"] = paths_json(removed);
  c["expected"]["added_branches"] = paths_json(added);
  return c;
}

}  // namespace

json derive_fixtures() {
  json out;

  // Unit 3-cycle 1 -> 2 -> 3 -> 1, S = {1}.
  {
    const auto m = from_edges(3, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 1, 1.0}});
    const auto s = members(3, {1});
    const auto br = oracle::branches(m, s);
    const oracle::Path closed{0, 1, 2, 0};
    json b11 = json::array();
    for (const auto& p : br)
      if (p.front() == 0 && p.back() == 0) b11.push_back(paths_json({p})[0]);
    const Eigen::VectorXd perron = oracle::perron(m.real());
    const Eigen::VectorXd lifted = perron / perron(0);
    out["three_cycle"] = {
        {"graph", edges_json(m)},
        {"depths", depth_list(m, s)},
        {"nilpotency", *oracle::nilpotency(m, s)},
        {"branches", paths_json(br)},
        {"branch_count", br.size()},
        {"b11", b11},
        {"weight_1231_lambda2", branch_weight(m, closed, 2.0).real()},
        {"weight_1231_lambda1", branch_weight(m, closed, 1.0).real()},
        {"reduced_lambda2", oracle::schur_reduced(m, s, 2.0)(0, 0).real()},
        {"reduced_lambda1", oracle::schur_reduced(m, s, 1.0)(0, 0).real()},
        {"by_length_lambda2",
         {oracle::reduced_by_length(m, s, 2.0, 1)(0, 0).real(), oracle::reduced_by_length(m, s, 2.0, 2)(0, 0).real(),
          oracle::reduced_by_length(m, s, 2.0, 3)(0, 0).real()}},
        {"extended", real_matrix(oracle::extended_reduced(m, s))},
        {"dominant", real_vector(perron)},
        {"lift_unnormalized", real_vector(lifted)},
    };
    // The cycle read as a deterministic chain; for S = {1} direction does not matter.
    const Eigen::MatrixXd p = m.real();
    json taboo = json::array();
    for (int n = 1; n <= 5; ++n) taboo.push_back(oracle::taboo_brute(p, s, 0, 0, n));
    out["three_cycle"]["taboo_11"] = taboo;
  }

  // Scaled 3-cycle, all weights 2: the dense oracle's dominant eigenvalue.
  {
    const auto m = from_edges(3, {{1, 2, 2.0}, {2, 3, 2.0}, {3, 1, 2.0}});
    double lambda = 0.0;
    oracle::perron(m.real(), &lambda);
    out["scaled_three_cycle"] = {{"graph", edges_json(m)}, {"lambda", lambda}};
  }

  // 2-cycle 1 <-> 2, S = {1}.
  {
    const auto m = from_edges(2, {{1, 2, 1.0}, {2, 1, 1.0}});
    const auto s = members(2, {1});
    const Eigen::MatrixXd p = m.real();
    out["two_cycle"] = {{"graph", edges_json(m)},
                        {"extended", real_matrix(oracle::extended_reduced(m, s))},
                        {"taboo_11_n1", oracle::taboo_brute(p, s, 0, 0, 1)},
                        {"taboo_11_n2", oracle::taboo_brute(p, s, 0, 0, 2)}};
  }

  // Path 4 -> 3 -> 2 -> 1, S = {1}.
  {
    const auto m = from_edges(4, {{4, 3, 1.0}, {3, 2, 1.0}, {2, 1, 1.0}});
    const auto s = members(4, {1});
    const auto br = oracle::branches(m, s);
    out["path4"] = {{"graph", edges_json(m)},
                    {"depths", depth_list(m, s)},
                    {"branches", paths_json(br)},
                    {"branch_count", br.size()}};
  }

  // Path 4 -> 3 -> 2 -> 1 closed by 1 -> 4: the dense dominant eigenvector.
  {
    const auto m = from_edges(4, {{4, 3, 1.0}, {3, 2, 1.0}, {2, 1, 1.0}, {1, 4, 1.0}});
    const auto es = oracle::eigen(m);
    json pairs = json::array();
    for (int k = 0; k < 4; ++k) {
      json vec = json::array();
      for (int i = 0; i < 4; ++i) vec.push_back({es.eigenvectors()(i, k).real(), es.eigenvectors()(i, k).imag()});
      pairs.push_back({{"lambda", {es.eigenvalues()(k).real(), es.eigenvalues()(k).imag()}}, {"vector", vec}});
    }
    out["path4_closed"] = {{"graph", edges_json(m)}, {"eigenpairs", pairs}};
  }

  // Random complex 8-vertex graph and its eigenvalues.
  {
    isograph::Rng rng(20240801);
    const auto g = oracle::random_graph(8, 0.3, true, rng, true);
    const auto m = g.dense();
    const auto es = oracle::eigen(m);
    json lambdas = json::array();
    for (int k = 0; k < 8; ++k) lambdas.push_back({es.eigenvalues()(k).real(), es.eigenvalues()(k).imag()});
    out["random8"] = {{"graph", edges_json(m)}, {"eigenvalues", lambdas}};
  }

  // Random positive 6-vertex graph (not stochastic): dense dominant eigenvalue.
  {
    isograph::Rng rng(6);
    Eigen::MatrixXcd m;
    for (;;) {
      auto g = oracle::random_graph(6, 0.45, false, rng);
      if (isograph::is_primitive(g)) {
        m = g.dense();
        break;
      }
    }
    double lambda = 0.0;
    const auto v = oracle::perron(m.real(), &lambda);
    out["random_positive6"] = {{"graph", edges_json(m)}, {"lambda", lambda}, {"perron", real_vector(v)}};
  }

  // Random stochastic 8-state instance (column convention) for the return identity.
  {
    isograph::Rng rng(88);
    const auto g = oracle::random_stochastic(8, 0.35, rng);
    out["random_stochastic8"] = {{"graph", edges_json(g.dense())}};
  }

  // 3-state chain (row-stochastic) with S = {1, 2}: reduced kernel by Schur complement.
  {
    Eigen::MatrixXd p(3, 3);
    p << 0.2, 0.5, 0.3, 0.6, 0.1, 0.3, 0.5, 0.5, 0.0;
    const auto s = members(3, {1, 2});
    const Eigen::MatrixXd r = oracle::schur_reduced(p.cast<Cplx>(), s, 1.0).real();
    out["chain3"] = {{"transition", real_matrix(p)}, {"structural_set", {1, 2}}, {"reduced", real_matrix(r)}};
  }

  // Random irreducible 10-state chain: stationary distribution from the eigensolver.
  {
    isograph::Rng rng(1010);
    const auto g = oracle::random_stochastic(10, 0.3, rng);
    const Eigen::MatrixXd p = g.dense_real().transpose();
    out["chain10"] = {{"transition", real_matrix(p)}, {"stationary", real_vector(oracle::perron(p.transpose()))}};
  }

  // Incremental updates, expected results by scratch recomputation on dense matrices.
  {
    const auto cycle = from_edges(3, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 1, 1.0}});
    json cases = json::array();
    cases.push_back(incremental_case("three_cycle_add_3_2", cycle, members(3, {1}), {{"add_edge", 3, 2, 1.0}}));
    cases.push_back(incremental_case("three_cycle_add_from_s", cycle, members(3, {1}), {{"add_edge", 1, 3, 1.0}}));
    const auto dense3 = from_edges(3, {{1, 2, 0.5}, {3, 2, 0.5}, {2, 1, 0.5}, {3, 1, 0.5}, {2, 3, 0.5}, {1, 3, 0.5}});
    cases.push_back(incremental_case("remove_single_branch_edge", dense3, members(3, {1, 2}), {{"remove_edge", 1, 2, 0.0}}));
    out["incremental"] = cases;
  }

  return out;
}

double json_distance(const json& a, const json& b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a.is_number() && b.is_number()) return std::abs(a.get<double>() - b.get<double>());
  if (a.type() != b.type()) return inf;
  if (a.is_array()) {
    if (a.size() != b.size()) return inf;
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, json_distance(a[k], b[k]));
    return d;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) return inf;
    double d = 0.0;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) return inf;
      d = std::max(d, json_distance(it.value(), b.at(it.key())));
    }
    return d;
  }
  return a == b ? 0.0 : inf;
}
