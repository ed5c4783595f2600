// One PASS/FAIL line per acceptance criterion. Exit status 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

#include "derive_fixtures.hpp"
#include "isograph/cost_model.hpp"
#include "isograph/experiment.hpp"
#include "isograph/markov.hpp"
#include "oracles.hpp"

using namespace isograph;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0.0 || secs < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %-28s %s  [%.2fs%s]\n", pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs,
              in_time ? "" : ", over time budget");
  std::fflush(stdout);
}

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

/// Instances shared by the Theorem-1 and length-partition criteria.
struct SpectralInstance {
  WeightedDigraph g;
  Complex lambda;
  StructuralSet s;
  Eigen::VectorXcd u;
};

/// S keeps every complement loop weight at least this far from lambda.
constexpr double kMargin = 0.1;

std::vector<SpectralInstance> spectral_instances(std::size_t& skipped_singular, std::size_t& skipped_degenerate,
                                                 double margin = kMargin) {
  Rng rng(2024);
  std::vector<SpectralInstance> out;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(9);
    const auto g = oracle::random_graph(n, 0.35, true, rng, true);
    for (const auto& pair : oracle::eigenpairs(g.dense())) {
      StructuralSet s;
      try {
        s = find_structural_set(g, pair.lambda, kDefaultTol, margin);
      } catch (const Error&) {
        ++skipped_singular;
        continue;
      }
      EigenPair u;
      u.lambda = pair.lambda;
      u.vertices = g.live_vertices();
      u.vector = pair.vector;
      try {
        if (verify_theorem1(g, s, u).degenerate) {
          ++skipped_degenerate;
          continue;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularWeight) throw;
        ++skipped_singular;
        continue;
      }
      out.push_back({g, pair.lambda, s, pair.vector});
    }
  }
  return out;
}

double residual(const SpectralInstance& x) {
  EigenPair u;
  u.lambda = x.lambda;
  u.vertices = x.g.live_vertices();
  u.vector = x.u;
  return verify_theorem1(x.g, x.s, u).residual;
}

Outcome theorem1() {
  std::size_t singular = 0, degenerate = 0;
  const auto inst = spectral_instances(singular, degenerate);
  double worst_res = 0.0, worst_gap = 0.0;
  for (const auto& x : inst) {
    worst_res = std::max(worst_res, residual(x));
    Eigen::VectorXcd us(Eigen::Index(x.s.size()));
    for (std::size_t a = 0; a < x.s.size(); ++a) us(Eigen::Index(a)) = x.u(Eigen::Index(x.s.members[a]));
    worst_gap = std::max(worst_gap, oracle::collinearity_gap(lift_eigenvector(x.g, x.s, x.lambda, us).vector, x.u));
  }
  // Same instances with the smallest structural sets, for comparison.
  std::size_t s0 = 0, d0 = 0;
  double worst_tight = 0.0;
  for (const auto& x : spectral_instances(s0, d0, 0.0)) worst_tight = std::max(worst_tight, residual(x));
  return {worst_res < 1e-9 && worst_gap < 1e-9 && !inst.empty(),
          fmt("%zu eigenpairs, max residual %.2e, max 1-|cos| %.2e (S margin %.2f; without margin %.2e; skipped: "
              "%zu singular weight, %zu u_S = 0)",
              inst.size(), worst_res, worst_gap, kMargin, worst_tight, singular, degenerate)};
}

Outcome length_partition() {
  std::size_t singular = 0, degenerate = 0;
  const auto inst = spectral_instances(singular, degenerate);
  double worst = 0.0;
  for (const auto& x : inst) {
    const auto r = reduced_matrix(x.g, x.s, x.lambda).entries;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(r.rows(), r.cols());
    for (std::size_t p = 1; p <= x.s.complement().size() + 1; ++p) sum += reduced_matrix_by_length(x.g, x.s, x.lambda, p);
    worst = std::max(worst, (sum - r).cwiseAbs().maxCoeff() / std::max(1.0, r.cwiseAbs().maxCoeff()));
  }
  return {worst < 1e-12 && !inst.empty(), fmt("%zu instances, max relative gap %.2e", inst.size(), worst)};
}

Outcome taboo() {
  Rng rng(77);
  double worst_len = 0.0, worst_tail = 0.0, worst_sum = 0.0;
  std::size_t irreducible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = oracle::random_stochastic(3 + rng.below(10), 0.3, rng);
    const auto s = find_structural_set(g, 1.0);
    const auto rep = verify_return_identity(g, s);
    worst_len = std::max({worst_len, rep.max_by_length, rep.max_total});
    worst_tail = std::max(worst_tail, rep.max_tail);
    const auto chain = MarkovChain::from_column_stochastic(g);
    if (!chain.irreducible()) continue;
    ++irreducible;
    const auto r = reduced_transition(chain, s.members);
    for (Eigen::Index a = 0; a < r.rows(); ++a) worst_sum = std::max(worst_sum, std::abs(r.row(a).sum() - 1.0));
  }
  return {worst_len < 1e-12 && worst_tail == 0.0 && worst_sum < 1e-10,
          fmt("100 chains, max |R^(n) - taboo| %.2e, tail %.1e; %zu irreducible, max |row sum - 1| %.2e", worst_len,
              worst_tail, irreducible, worst_sum)};
}

Outcome monte_carlo() {
  Rng rng(505);
  std::size_t entries = 0, within = 0;
  double worst_stationary = 0.0, worst_tv = 0.0;
  for (int chain_id = 0; chain_id < 20; ++chain_id) {
    const auto g = oracle::random_stochastic(3 + rng.below(6), 0.35, rng);
    const auto chain = MarkovChain::from_column_stochastic(g);
    const auto s = find_structural_set(g, 1.0).members;
    const auto sample = simulate_stopped_chain_parallel(chain, s, 250000, derive_seed(505, std::uint64_t(chain_id)), s[0], 4);
    const auto band = check_bands(sample, reduced_transition(chain, s));
    entries += band.entries;
    within += band.within;
    worst_tv = std::max(worst_tv, band.total_variation);
    worst_stationary = std::max(worst_stationary, verify_stationary_restriction(chain, s));
  }
  const double frac = entries == 0 ? 0.0 : double(within) / double(entries);
  return {frac >= 0.95 && worst_stationary < 1e-10,
          fmt("20 chains x 1e6 steps, %zu/%zu entries in 3-sigma band (%.2f%%), max TV %.4f, stationary gap %.2e", within,
              entries, 100.0 * frac, worst_tv, worst_stationary)};
}

Outcome incremental() {
  const DeltaMix mixes[] = {
      {1.0, 0.0, 0.0, 0.0, false}, {0.0, 1.0, 0.0, 0.0, false}, {0.0, 0.0, 1.0, 0.0, false},
      {0.0, 0.0, 0.0, 1.0, false}, {0.6, 0.2, 0.1, 0.1, false}, {0.6, 0.2, 0.1, 0.1, true},
  };
  Rng rng(9000);
  std::size_t pairs = 0, matched = 0, promotions = 0, fallbacks = 0;
  std::size_t kinds[4] = {0, 0, 0, 0};
  double worst_eigen = 0.0, worst_matrix = 0.0;
  for (std::size_t attempt = 0; pairs < 100 && attempt < 1000; ++attempt) {
    const auto& mix = mixes[attempt % 6];
    GeneratorOptions gen;
    gen.n = 5 + rng.below(36);
    gen.avg_out_degree = rng.uniform(1.5, 3.0);
    const auto base = StoredState::build(generate_random_graph(gen, rng));
    const std::size_t p = mix.add_vertex == 1.0 ? 3 : 1 + rng.below(3);
    GraphDelta delta;
    try {
      delta = random_delta(base, p, rng, mix);
    } catch (const Error&) {
      continue;
    }
    ++pairs;
    for (const auto& op : delta.ops) ++kinds[int(op.kind)];
    const auto out = update(base, delta);
    const auto scratch = scratch_update(base, delta);
    promotions += out.log.promotions();
    fallbacks += out.log.structural_fallback ? 1 : 0;
    const bool same = out.state.structural.members == scratch.structural.members &&
                      out.state.branches == scratch.branches &&
                      out.state.extended.entries.rows() == scratch.extended.entries.rows();
    const double gap = same ? (out.state.extended.entries - scratch.extended.entries).cwiseAbs().maxCoeff() : 1.0;
    worst_matrix = std::max(worst_matrix, gap);
    const double eig = (out.state.dominant.vector.real() - oracle::live_perron(out.state.graph)).cwiseAbs().maxCoeff();
    worst_eigen = std::max(worst_eigen, eig);
    if (same && gap <= 1e-12 && eig <= 1e-8) ++matched;
  }
  const bool covered = kinds[0] > 0 && kinds[1] > 0 && kinds[2] > 0 && kinds[3] > 0 && promotions > 0;
  return {pairs == 100 && matched == pairs && covered,
          fmt("%zu/%zu pairs match (max matrix gap %.2e, max eigenvector gap %.2e); ops: %zu add_vertex, %zu "
              "remove_vertex, %zu add_edge, %zu remove_edge; %zu promotions, %zu fallbacks",
              matched, pairs, worst_matrix, worst_eigen, kinds[0], kinds[1], kinds[2], kinds[3], promotions, fallbacks)};
}

Outcome simplex() {
  Rng rng(31337);
  bool ok = true;
  double worst_attain = 0.0, worst_ratio = 0.0;
  const double n = 60.0;
  std::vector<double> x;
  for (std::size_t m = 1; m <= 20; ++m) {
    x.assign(m + 1, 0.0);
    for (int sample = 0; sample < 100000; ++sample) {
      for (std::size_t i = 0; i < m; ++i) x[i] = rng.uniform(0.0, n);
      x[m] = n;
      std::sort(x.begin(), x.begin() + std::ptrdiff_t(m));
      const auto r = simplex_bound(x);
      ok = ok && r.value <= r.bound * (1.0 + 1e-12) && r.bound <= n * n / 2.0;
      worst_ratio = std::max(worst_ratio, r.value / r.bound);
    }
    for (std::size_t i = 0; i <= m; ++i) x[i] = double(i + 1) * n / double(m + 1);
    const auto b = simplex_bound(x);
    worst_attain = std::max(worst_attain, std::abs(b.value - b.bound) / b.bound);
  }
  return {ok && worst_attain < 1e-9,
          fmt("2e6 samples, max F/bound %.6f, progression attains bound within %.1e", worst_ratio, worst_attain)};
}

Outcome cost_experiment() {
  ExperimentConfig cfg;
  cfg.trials = 50;
  const auto r = run_experiment(cfg);
  const auto published = bound_report({60, 14, 13, 1125, 10, 3});
  const bool majority = r.fraction_above_threshold() > 0.5;
  return {majority && r.trials.size() >= 50 && published.bounds_hold() && r.fraction_matching_scratch() == 1.0,
          fmt("N=60 p=3 ell=10, %zu trials (%zu failed): %.0f%% above 70%% savings (mean %.2f%%, median %.2f%%), bounds hold in "
              "%.0f%%, scale conditions met in %.0f%%, scratch match %.0f%%; published s=14 k=13 m=1125 bound report: "
              "savings %.2f%% (published 87.94%%), invariants %s",
              r.trials.size(), r.failures.size(), 100 * r.fraction_above_threshold(), 100 * r.mean_savings(), 100 * r.median_savings(),
              100 * r.fraction_bounds_hold(), 100 * r.fraction_meeting_conditions(),
              100 * r.fraction_matching_scratch(), 100 * published.savings,
              published.bounds_hold() ? "hold" : "violated")};
}

Outcome fixtures() {
  std::ifstream in(ISOGRAPH_FIXTURES);
  if (!in) return {false, "fixture file missing"};
  const auto frozen = nlohmann::json::parse(in);
  const auto fresh = derive_fixtures();
  const double d = json_distance(frozen, fresh);
  return {d <= 1e-12, fmt("%zu fixture groups re-derived from the oracles, max deviation %.1e", frozen.size(), d)};
}

}  // namespace

int main() {
  run("theorem1-round-trip", 30.0, theorem1);
  run("length-partition", 0.0, length_partition);
  run("taboo-identity", 0.0, taboo);
  run("stopped-chain-monte-carlo", 120.0, monte_carlo);
  run("incremental-equals-scratch", 0.0, incremental);
  run("simplex-lemma", 0.0, simplex);
  run("cost-experiment", 300.0, cost_experiment);
  run("derived-fixtures", 0.0, fixtures);
  return failures == 0 ? 0 : 1;
}
