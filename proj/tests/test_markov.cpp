#include <doctest.h>

#include "isograph/markov.hpp"
#include "oracles.hpp"

using namespace isograph;

namespace {

Eigen::MatrixXd chain3() {
  Eigen::MatrixXd p(3, 3);
  p << 0.2, 0.5, 0.3, 0.6, 0.1, 0.3, 0.5, 0.5, 0.0;
  return p;
}

std::vector<bool> mask(std::size_t n, const VertexList& s) {
  std::vector<bool> in(n, false);
  for (Vertex v : s) in[v] = true;
  return in;
}

}  // namespace

TEST_CASE("chain construction") {
  CHECK_NOTHROW(MarkovChain{chain3()});
  Eigen::MatrixXd bad = chain3();
  bad(0, 0) = 0.3;
  CHECK_THROWS_AS(MarkovChain{bad}, Error);
  bad = chain3();
  bad(0, 0) = -0.1;
  bad(0, 1) = 0.8;
  CHECK_THROWS_AS(MarkovChain{bad}, Error);

  const MarkovChain c(chain3());
  CHECK(c.irreducible());
  const auto col = c.column_stochastic_graph();
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(col.dense_real().col(j).sum() == doctest::Approx(1.0));
  const auto back = MarkovChain::from_column_stochastic(col);
  CHECK(back.transition() == c.transition());

  Eigen::MatrixXd split = Eigen::MatrixXd::Identity(2, 2);
  CHECK_FALSE(MarkovChain(split).irreducible());
  CHECK_THROWS_AS(stationary_distribution(MarkovChain(split)), Error);
}

TEST_CASE("reduced transition of the 3-state chain") {
  const MarkovChain c(chain3());
  const auto r = reduced_transition(c, {0, 1});
  Eigen::MatrixXd expected(2, 2);
  expected << 0.35, 0.65, 0.75, 0.25;
  CHECK((r - expected).cwiseAbs().maxCoeff() < 1e-15);

  CHECK(taboo_probability(c, {0, 1}, 0, 0, 1) == doctest::Approx(0.2));
  CHECK(taboo_probability(c, {0, 1}, 0, 0, 2) == doctest::Approx(0.15));
  CHECK(taboo_probability(c, {0, 1}, 0, 0, 3) == 0.0);
  CHECK(verify_stationary_restriction(c, {0, 1}) < 1e-14);
}

TEST_CASE("taboo probability on the 3-cycle") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 3);
  p(0, 1) = p(1, 2) = p(2, 0) = 1.0;
  const MarkovChain c(p);
  const double expected[] = {0.0, 0.0, 1.0, 0.0, 0.0};
  for (std::size_t n = 1; n <= 5; ++n) CHECK(taboo_probability(c, {0}, 0, 0, n) == expected[n - 1]);
  CHECK(taboo_probability(c, {0}, 1, 0, 2) == 1.0);
  CHECK_THROWS_AS(taboo_probability(c, {0}, 3, 0, 2), Error);
  CHECK_THROWS_AS(taboo_probability(c, {0}, 0, 0, 0), Error);
}

TEST_CASE("taboo DP matches brute-force sequence sums") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng.below(4);
    const auto g = oracle::random_stochastic(n, 0.45, rng);
    const auto chain = MarkovChain::from_column_stochastic(g);
    VertexList s;
    for (Vertex v = 0; v < n; ++v)
      if (rng.uniform() < 0.5) s.push_back(v);
    if (s.empty()) s.push_back(0);
    const auto in = mask(n, s);
    for (Vertex i : s)
      for (Vertex j : s)
        for (std::size_t len = 1; len <= n + 1; ++len)
          CHECK(std::abs(taboo_probability(chain, s, i, j, len) -
                         oracle::taboo_brute(chain.transition(), in, int(i), int(j), int(len))) < 1e-14);
  }
}

TEST_CASE("return identity on random stochastic graphs") {
  Rng rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = oracle::random_stochastic(3 + rng.below(10), 0.3, rng);
    const auto s = find_structural_set(g, 1.0);
    const auto rep = verify_return_identity(g, s);
    CHECK(rep.max_by_length < 1e-12);
    CHECK(rep.max_total < 1e-12);
    CHECK(rep.max_tail == 0.0);
    const auto r = reduced_transition(MarkovChain::from_column_stochastic(g), s.members);
    for (Eigen::Index a = 0; a < r.rows(); ++a) CHECK(std::abs(r.row(a).sum() - 1.0) < 1e-10);
  }
}

TEST_CASE("stationary distribution and its restriction") {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_stochastic(3 + rng.below(9), 0.3, rng);
    const auto chain = MarkovChain::from_column_stochastic(g);
    const auto q = stationary_distribution(chain);
    CHECK((q - oracle::perron(g.dense_real())).cwiseAbs().maxCoeff() < 1e-10);
    const auto s = find_structural_set(g, 1.0);
    CHECK(verify_stationary_restriction(chain, s.members) < 1e-10);
  }
}

TEST_CASE("stopped chain simulation") {
  const MarkovChain c(chain3());
  const VertexList s{0, 1};
  const auto a = simulate_stopped_chain(c, s, 20000, 5, 2);
  const auto b = simulate_stopped_chain(c, s, 20000, 5, 2);
  CHECK(a.visits == b.visits);
  CHECK(a.counts == b.counts);
  CHECK(a.counts.sum() == double(a.visits.size() - 1));
  const auto band = check_bands(a, reduced_transition(c, s));
  CHECK(band.fraction() >= 0.75);
  CHECK(band.total_variation < 0.05);

  const auto par = simulate_stopped_chain_parallel(c, s, 10000, 9, 0, 4);
  const auto par2 = simulate_stopped_chain_parallel(c, s, 10000, 9, 0, 4);
  CHECK(par.counts == par2.counts);
  auto sum = simulate_stopped_chain(c, s, 10000, 9, 0);
  for (std::uint64_t k = 1; k < 4; ++k) sum = merge(sum, simulate_stopped_chain(c, s, 10000, 9 + k, 0));
  CHECK(par.counts == sum.counts);

  const auto j = a.to_json();
  CHECK(j.at("steps") == 20000);

  Eigen::MatrixXd trap = Eigen::MatrixXd::Zero(3, 3);
  trap(0, 1) = 1.0;
  trap(1, 1) = 1.0;
  trap(2, 0) = 1.0;
  CHECK_THROWS_AS(simulate_stopped_chain(MarkovChain(trap), {2}, 1000, 1, 0), Error);
}
