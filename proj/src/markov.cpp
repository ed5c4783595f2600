#include "isograph/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <omp.h>

#include "isograph/rng.hpp"

namespace isograph {

MarkovChain::MarkovChain(Eigen::MatrixXd transition, double tol) : p_(std::move(transition)) {
  if (p_.rows() == 0 || p_.rows() != p_.cols())
    throw Error(ErrorKind::InvalidInput, "transition matrix must be square and nonempty");
  if ((p_.array() < 0.0).any() || (p_.array() > 1.0 + tol).any())
    throw Error(ErrorKind::InvalidInput, "transition probabilities must lie in [0, 1]");
  for (Eigen::Index i = 0; i < p_.rows(); ++i)
    if (std::abs(p_.row(i).sum() - 1.0) > tol)
      throw Error(ErrorKind::InvalidInput, "row " + std::to_string(i + 1) + " does not sum to one");
}

MarkovChain MarkovChain::from_column_stochastic(const WeightedDigraph& g) {
  if (g.live_count() != g.slot_count())
    throw Error(ErrorKind::InvalidInput, "compact the graph before building a chain");
  const Eigen::MatrixXcd m = g.dense();
  if (m.imag().cwiseAbs().maxCoeff() > 1e-10) throw Error(ErrorKind::InvalidMode, "graph has complex weights");
  return MarkovChain(m.real().transpose(), 1e-10);
}

WeightedDigraph MarkovChain::transition_graph() const {
  WeightedDigraph g(states());
  for (Eigen::Index i = 0; i < p_.rows(); ++i)
    for (Eigen::Index j = 0; j < p_.cols(); ++j)
      if (p_(i, j) != 0.0) g.set_weight(Vertex(i), Vertex(j), p_(i, j));
  return g;
}

WeightedDigraph MarkovChain::column_stochastic_graph() const { return transpose(transition_graph()); }

bool MarkovChain::irreducible() const { return is_strongly_connected(transition_graph()); }

namespace {

std::vector<bool> mask_of(std::size_t n, const VertexList& s) {
  std::vector<bool> in_s(n, false);
  for (Vertex v : s) {
    if (v >= n) throw Error(ErrorKind::InvalidInput, "state " + std::to_string(v + 1) + " out of range");
    in_s[v] = true;
  }
  return in_s;
}

// Row vector of Pr[X_n = j, X_k not in S for 0 < k < n | X_0 = i] over all j.
Eigen::RowVectorXd taboo_row(const MarkovChain& chain, const std::vector<bool>& in_s, Vertex i,
                             std::size_t n) {
  const auto& p = chain.transition();
  Eigen::RowVectorXd f = p.row(Eigen::Index(i));
  for (std::size_t step = 2; step <= n; ++step) {
    for (Eigen::Index k = 0; k < f.size(); ++k)
      if (in_s[std::size_t(k)]) f(k) = 0.0;
    f = f * p;
  }
  return f;
}

}  // namespace

double taboo_probability(const MarkovChain& chain, const VertexList& s, Vertex i, Vertex j,
                         std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "taboo probabilities start at n = 1");
  if (i >= chain.states() || j >= chain.states())
    throw Error(ErrorKind::InvalidInput, "state out of range");
  return taboo_row(chain, mask_of(chain.states(), s), i, n)(Eigen::Index(j));
}

Eigen::MatrixXd taboo_matrix(const MarkovChain& chain, const VertexList& s, std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "taboo probabilities start at n = 1");
  const auto in_s = mask_of(chain.states(), s);
  const auto size = Eigen::Index(s.size());
  Eigen::MatrixXd t(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    const auto row = taboo_row(chain, in_s, s[std::size_t(a)], n);
    for (Eigen::Index b = 0; b < size; ++b) t(a, b) = row(Eigen::Index(s[std::size_t(b)]));
  }
  return t;
}

ReturnIdentityReport verify_return_identity(const WeightedDigraph& g, const StructuralSet& s) {
  if (!g.stochastic())
    throw Error(ErrorKind::InvalidMode, "return identity needs a stochastic graph");
  if (s.lambda != Complex{1.0, 0.0})
    throw Error(ErrorKind::InvalidMode, "return identity holds at lambda = 1");
  for (Vertex v : s.complement())
    if (g.has_edge(v, v)) throw Error(ErrorKind::InvalidMode, "loop outside S");

  const auto chain = MarkovChain::from_column_stochastic(g);
  const auto forward = chain.transition_graph();
  const auto structural = compute_depths(forward, s.members, 1.0);
  const auto branches = enumerate_branches(forward, structural, {.starts_in_s = true, .ends_in_s = true});
  const std::size_t longest = g.live_count() - s.size() + 1;

  const auto size = Eigen::Index(s.size());
  std::vector<Eigen::Index> pos(g.slot_count(), -1);
  for (std::size_t k = 0; k < s.size(); ++k) pos[s.members[k]] = Eigen::Index(k);
  std::vector<Eigen::MatrixXd> by_length(longest + 1, Eigen::MatrixXd::Zero(size, size));
  for (const Branch& b : branches.all())
    by_length[b.length()](pos[b.front()], pos[b.back()]) += path_product(forward, b);

  ReturnIdentityReport report;
  Eigen::MatrixXd total_r = Eigen::MatrixXd::Zero(size, size);
  Eigen::MatrixXd total_taboo = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t n = 1; n <= longest; ++n) {
    const auto taboo = taboo_matrix(chain, s.members, n);
    report.max_by_length = std::max(report.max_by_length, (by_length[n] - taboo).cwiseAbs().maxCoeff());
    total_r += by_length[n];
    total_taboo += taboo;
  }
  report.max_total = (total_r - total_taboo).cwiseAbs().maxCoeff();
  report.max_tail = taboo_matrix(chain, s.members, longest + 1).cwiseAbs().maxCoeff();
  return report;
}

Eigen::MatrixXd StoppedChainSample::empirical() const {
  Eigen::MatrixXd e = counts;
  for (Eigen::Index a = 0; a < e.rows(); ++a) {
    const double total = e.row(a).sum();
    if (total > 0.0) e.row(a) /= total;
  }
  return e;
}

nlohmann::json StoppedChainSample::to_json() const {
  auto matrix = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back(m(a, b));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json ids = nlohmann::json::array();
  for (Vertex v : states) ids.push_back(v + 1);
  return {{"seed", seed},
          {"steps", steps},
          {"states", std::move(ids)},
          {"visits", visits.size()},
          {"counts", matrix(counts)},
          {"empirical", matrix(empirical())}};
}

StoppedChainSample simulate_stopped_chain(const MarkovChain& chain, const VertexList& s,
                                          std::size_t steps, std::uint64_t seed, Vertex start) {
  const auto n = chain.states();
  if (start >= n) throw Error(ErrorKind::InvalidInput, "start state out of range");
  if (s.empty()) throw Error(ErrorKind::InvalidInput, "S must be nonempty");
  const auto in_s = mask_of(n, s);
  std::vector<Eigen::Index> pos(n, -1);
  for (std::size_t k = 0; k < s.size(); ++k) pos[s[k]] = Eigen::Index(k);

  // Cumulative rows; the last positive entry absorbs rounding at the top end.
  const auto& p = chain.transition();
  std::vector<std::vector<double>> cumulative(n);
  std::vector<Vertex> last_positive(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += p(Eigen::Index(i), Eigen::Index(j));
      cumulative[i].push_back(acc);
      if (p(Eigen::Index(i), Eigen::Index(j)) > 0.0) last_positive[i] = j;
    }
  }

  StoppedChainSample sample;
  sample.seed = seed;
  sample.steps = steps;
  sample.states = s;
  sample.counts = Eigen::MatrixXd::Zero(Eigen::Index(s.size()), Eigen::Index(s.size()));

  Rng rng(seed);
  Vertex x = start;
  if (in_s[x]) sample.visits.push_back(x);
  for (std::size_t t = 0; t < steps; ++t) {
    const double u = rng.uniform();
    const auto& row = cumulative[x];
    auto it = std::upper_bound(row.begin(), row.end(), u);
    Vertex next = it == row.end() ? last_positive[x] : Vertex(it - row.begin());
    if (p(Eigen::Index(x), Eigen::Index(next)) == 0.0) next = last_positive[x];
    x = next;
    if (!in_s[x]) continue;
    if (!sample.visits.empty()) sample.counts(pos[sample.visits.back()], pos[x]) += 1.0;
    sample.visits.push_back(x);
  }
  if (sample.visits.empty())
    throw Error(ErrorKind::StuckSimulation,
                "S was not reached within " + std::to_string(steps) + " steps");
  return sample;
}

StoppedChainSample merge(const StoppedChainSample& a, const StoppedChainSample& b) {
  if (a.states != b.states) throw Error(ErrorKind::InvalidInput, "samples observe different S");
  StoppedChainSample m = a;
  m.steps += b.steps;
  m.visits.insert(m.visits.end(), b.visits.begin(), b.visits.end());
  m.counts += b.counts;
  return m;
}

StoppedChainSample simulate_stopped_chain_parallel(const MarkovChain& chain, const VertexList& s,
                                                   std::size_t steps_per_stream, std::uint64_t seed,
                                                   Vertex start, std::size_t streams) {
  if (streams == 0) throw Error(ErrorKind::InvalidInput, "need at least one stream");
  std::vector<StoppedChainSample> parts(streams);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(streams); ++k)
    parts[std::size_t(k)] = simulate_stopped_chain(chain, s, steps_per_stream, seed + std::uint64_t(k), start);
  StoppedChainSample total = parts.front();
  for (std::size_t k = 1; k < streams; ++k) total = merge(total, parts[k]);
  return total;
}

Eigen::MatrixXd reduced_transition(const MarkovChain& chain, const VertexList& s) {
  const auto forward = chain.transition_graph();
  const auto structural = compute_depths(forward, s, 1.0);
  return reduced_matrix(forward, structural, 1.0).entries.real();
}

BandCheck check_bands(const StoppedChainSample& sample, const Eigen::MatrixXd& expected,
                      double sigmas) {
  if (expected.rows() != sample.counts.rows() || expected.cols() != sample.counts.cols())
    throw Error(ErrorKind::InvalidInput, "expected matrix does not match the sample");
  BandCheck check;
  for (Eigen::Index a = 0; a < sample.counts.rows(); ++a) {
    const double total = sample.counts.row(a).sum();
    if (total == 0.0) continue;
    double tv = 0.0;
    for (Eigen::Index b = 0; b < sample.counts.cols(); ++b) {
      const double p = expected(a, b);
      const double observed = sample.counts(a, b) / total;
      const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / total);
      ++check.entries;
      if (std::abs(observed - p) <= sigmas * sigma + 1e-12) ++check.within;
      tv += std::abs(observed - p);
    }
    check.total_variation = std::max(check.total_variation, 0.5 * tv);
  }
  return check;
}

Eigen::VectorXd stationary_distribution(const MarkovChain& chain) {
  if (!chain.irreducible())
    throw Error(ErrorKind::Ambiguous, "chain is reducible; the stationary distribution may not be unique");
  const auto n = Eigen::Index(chain.states());
  Eigen::MatrixXd a = chain.transition().transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  return a.fullPivLu().solve(rhs);
}

double verify_stationary_restriction(const MarkovChain& chain, const VertexList& s) {
  const auto q = stationary_distribution(chain);
  Eigen::VectorXd q_s(Eigen::Index(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) q_s(Eigen::Index(k)) = q(Eigen::Index(s[k]));
  q_s /= q_s.sum();

  const MarkovChain reduced(reduced_transition(chain, s), 1e-9);
  const auto r = stationary_distribution(reduced);
  return (q_s - r).cwiseAbs().maxCoeff();
}

}  // namespace isograph
