#include <doctest.h>

#include <fstream>

#include "isograph/graph_io.hpp"
#include "isograph/incremental.hpp"
#include "isograph/markov.hpp"
#include "oracles.hpp"

using namespace isograph;
using nlohmann::json;

namespace {

const json& fixtures() {
  static const json j = [] {
    std::ifstream in(ISOGRAPH_FIXTURES);
    REQUIRE(in.good());
    return json::parse(in);
  }();
  return j;
}

VertexList ids(const json& j) {
  VertexList out;
  for (const auto& v : j) out.push_back(v.get<Vertex>() - 1);
  return out;
}

std::set<VertexList> paths(const json& j) {
  std::set<VertexList> out;
  for (const auto& p : j) out.insert(ids(p));
  return out;
}

std::set<VertexList> paths(const BranchSet& b) {
  std::set<VertexList> out;
  for (const auto& br : b.all()) out.insert(br.vertices);
  return out;
}

Eigen::MatrixXd matrix(const json& j) {
  Eigen::MatrixXd m(Eigen::Index(j.size()), Eigen::Index(j.at(0).size()));
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < j[r].size(); ++c) m(Eigen::Index(r), Eigen::Index(c)) = j[r][c].get<double>();
  return m;
}

Eigen::VectorXd vec(const json& j) {
  Eigen::VectorXd v(Eigen::Index(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(Eigen::Index(k)) = j[k].get<double>();
  return v;
}

Complex cplx(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

WeightedDigraph graph(const char* name) { return graph_from_json(fixtures().at(name).at("graph")); }

WeightedDigraph stochastic(const char* name) {
  auto g = graph(name);
  g.mark_stochastic();
  return g;
}

}  // namespace

TEST_CASE("unit 3-cycle") {
  const auto& f = fixtures().at("three_cycle");
  const auto g = stochastic("three_cycle");
  const auto s = compute_depths(g, {0}, 1.0);
  CHECK(s.depth_of == f.at("depths").get<std::vector<int>>());
  CHECK(nilpotency_index(g, {0}) == f.at("nilpotency").get<int>());

  const auto b = enumerate_branches(g, s);
  CHECK(b.size() == f.at("branch_count").get<std::size_t>());
  CHECK(paths(b) == paths(f.at("branches")));
  std::set<VertexList> b11;
  for (const Branch* p : b.between(0, 0)) b11.insert(p->vertices);
  CHECK(b11 == paths(f.at("b11")));

  const Branch cyc{{0, 1, 2, 0}};
  CHECK(std::abs(branch_weight(g, cyc, 1.0) - f.at("weight_1231_lambda1").get<double>()) < 1e-15);
  CHECK(std::abs(branch_weight(g, cyc, 2.0) - f.at("weight_1231_lambda2").get<double>()) < 1e-15);
  CHECK(std::abs(reduced_matrix(g, s, 1.0).entries(0, 0) - f.at("reduced_lambda1").get<double>()) < 1e-15);
  CHECK(std::abs(reduced_matrix(g, s, 2.0).entries(0, 0) - f.at("reduced_lambda2").get<double>()) < 1e-15);
  const auto by_length = vec(f.at("by_length_lambda2"));
  for (std::size_t p = 1; p <= 3; ++p)
    CHECK(std::abs(reduced_matrix_by_length(g, s, 2.0, p)(0, 0) - by_length(Eigen::Index(p - 1))) < 1e-15);

  CHECK((extended_reduced_matrix(g, s).entries - matrix(f.at("extended"))).cwiseAbs().maxCoeff() < 1e-15);

  const auto lifted = lift_eigenvector(g, s, 1.0, Eigen::VectorXcd::Constant(1, 1.0));
  CHECK(oracle::collinearity_gap(lifted.vector, vec(f.at("lift_unnormalized")).cast<Complex>()) < 1e-15);

  const auto st = StoredState::build(g, VertexList{0});
  CHECK((st.dominant.vector.real() - vec(f.at("dominant"))).cwiseAbs().maxCoeff() < 1e-12);

  const auto chain = MarkovChain::from_column_stochastic(g);
  const auto taboo = f.at("taboo_11").get<std::vector<double>>();
  for (std::size_t n = 1; n <= taboo.size(); ++n)
    CHECK(std::abs(taboo_probability(chain, {0}, 0, 0, n) - taboo[n - 1]) < 1e-15);
}

TEST_CASE("scaled 3-cycle co-iteration") {
  const auto& f = fixtures().at("scaled_three_cycle");
  const auto g = graph("scaled_three_cycle");
  const double lambda = f.at("lambda").get<double>();
  const auto s = compute_depths(g, {0}, lambda);
  const auto r = reduced_eigen_co_iteration(g, s, 1.5, {});
  CHECK(std::abs(r.lambda - lambda) < 1e-10);
}

TEST_CASE("2-cycle") {
  const auto& f = fixtures().at("two_cycle");
  const auto g = stochastic("two_cycle");
  const auto s = compute_depths(g, {0}, 1.0);
  CHECK((extended_reduced_matrix(g, s).entries - matrix(f.at("extended"))).cwiseAbs().maxCoeff() < 1e-15);
  const auto chain = MarkovChain::from_column_stochastic(g);
  CHECK(taboo_probability(chain, {0}, 0, 0, 1) == f.at("taboo_11_n1").get<double>());
  CHECK(taboo_probability(chain, {0}, 0, 0, 2) == f.at("taboo_11_n2").get<double>());
}

TEST_CASE("path 4 -> 3 -> 2 -> 1") {
  const auto& f = fixtures().at("path4");
  const auto g = graph("path4");
  const auto s = compute_depths(g, {0}, 1.0);
  CHECK(s.depth_of == f.at("depths").get<std::vector<int>>());
  const auto b = enumerate_branches(g, s);
  CHECK(b.size() == f.at("branch_count").get<std::size_t>());
  CHECK(paths(b) == paths(f.at("branches")));
}

TEST_CASE("closed path eigenpairs lift") {
  const auto g = graph("path4_closed");
  for (const auto& e : fixtures().at("path4_closed").at("eigenpairs")) {
    const Complex lambda = cplx(e.at("lambda"));
    Eigen::VectorXcd v(Eigen::Index(e.at("vector").size()));
    for (std::size_t k = 0; k < e.at("vector").size(); ++k) v(Eigen::Index(k)) = cplx(e.at("vector")[k]);
    const auto s = compute_depths(g, {0}, lambda);
    const auto lifted = lift_eigenvector(g, s, lambda, Eigen::VectorXcd::Constant(1, v(0)));
    CHECK(oracle::collinearity_gap(lifted.vector, v) < 1e-12);
  }
}

TEST_CASE("random complex graph: oracle eigenvalues are reduced-matrix eigenvalues") {
  const auto g = graph("random8");
  const double scale = std::max(1.0, g.dense().norm());
  int checked = 0;
  for (const auto& e : fixtures().at("random8").at("eigenvalues")) {
    const Complex lambda = cplx(e);
    StructuralSet s;
    try {
      s = find_structural_set(g, lambda);
      const auto r = reduced_matrix(g, s, lambda);
      const Eigen::MatrixXcd shifted = r.entries - lambda * Eigen::MatrixXcd::Identity(r.entries.rows(), r.entries.cols());
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
      CHECK(svd.singularValues().minCoeff() < 1e-8 * scale);
      ++checked;
    } catch (const Error& err) {
      CHECK((err.kind() == ErrorKind::SingularWeight || err.kind() == ErrorKind::NotStructural));
    }
  }
  CHECK(checked >= 6);
}

TEST_CASE("random positive graph: co-iteration and lift give the Perron pair") {
  const auto& f = fixtures().at("random_positive6");
  const auto g = graph("random_positive6");
  const double lambda = f.at("lambda").get<double>();
  const auto s = find_structural_set(g, lambda);
  const auto r = reduced_eigen_co_iteration(g, s, lambda * 1.2, {});
  CHECK(std::abs(r.lambda - lambda) < 1e-6);
  const auto lifted = lift_eigenvector(g, s, r.lambda, r.u_s.vector, Normalization::L1Positive);
  CHECK((lifted.vector.real() - vec(f.at("perron"))).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("random stochastic graph: return identity and column sums") {
  const auto g = stochastic("random_stochastic8");
  const auto s = find_structural_set(g, 1.0);
  const auto rep = verify_return_identity(g, s);
  CHECK(rep.max_by_length < 1e-12);
  CHECK(rep.max_total < 1e-12);
  const Eigen::MatrixXd block = extended_reduced_matrix(g, s).structural_block(s.members);
  for (Eigen::Index c = 0; c < block.cols(); ++c) CHECK(std::abs(block.col(c).sum() - 1.0) < 1e-12);
}

TEST_CASE("3-state chain reduced kernel") {
  const auto& f = fixtures().at("chain3");
  const MarkovChain chain(matrix(f.at("transition")));
  const auto r = reduced_transition(chain, ids(f.at("structural_set")));
  CHECK((r - matrix(f.at("reduced"))).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("10-state chain stationary distribution") {
  const auto& f = fixtures().at("chain10");
  const MarkovChain chain(matrix(f.at("transition")));
  CHECK((stationary_distribution(chain) - vec(f.at("stationary"))).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("incremental cases") {
  for (const auto& c : fixtures().at("incremental")) {
    const auto name = c.at("name").get<std::string>();
    CAPTURE(name);
    auto g = graph_from_json(c.at("graph"));
    g.mark_stochastic();
    const auto base = StoredState::build(g, ids(c.at("structural_set")));
    const auto delta = GraphDelta::from_json(c.at("delta"));
    const auto out = update(base, delta);
    const auto& e = c.at("expected");
    CHECK(out.state.structural.members == ids(e.at("structural_set")));
    CHECK(paths(out.state.branches) == paths(e.at("branches")));
    CHECK((out.state.extended.entries - matrix(e.at("extended"))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((out.state.dominant.vector.real() - vec(e.at("dominant"))).cwiseAbs().maxCoeff() < 1e-8);

    std::set<VertexList> removed, added;
    const auto before = paths(base.branches), after = paths(out.state.branches);
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::inserter(removed, removed.end()));
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::inserter(added, added.end()));
    CHECK(removed == paths(e.at("removed_branches")));
    CHECK(added == paths(e.at("added_branches")));
    CHECK_FALSE(out.log.structural_fallback);
  }
}
