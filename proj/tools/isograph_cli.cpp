// isograph: command-line front end.
//
//   isograph reduce   GRAPH [--lambda re[,im]] [--set 1,3] [--by-length]
//   isograph lift     GRAPH [--lambda re[,im]] [--set 1,3] [--norm l1|l2]
//   isograph update   (--graph GRAPH | --state DIR) [--delta FILE | --random P] [--save DIR] [--check]
//   isograph simulate GRAPH [--set ...] [--steps N] [--streams K] [--start V]
//   isograph bench    [--n N] [--trials T] ... [--csv FILE] [--plot-dir DIR] [--sweep 10,20,...]
//   isograph verify   [GRAPH ...] [--state DIR] [--seeds K]
//
// Vertices are one-based on the command line and in every report.
// Exit status: 0 success, 1 invariant failure, 2 invalid input.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <json.hpp>

#include "isograph/cost_model.hpp"
#include "isograph/experiment.hpp"
#include "isograph/generator.hpp"
#include "isograph/graph_io.hpp"
#include "isograph/incremental.hpp"
#include "isograph/markov.hpp"
#include "isograph/spectral.hpp"

using namespace isograph;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInvariant = 1;
constexpr int kInvalid = 2;

struct Global {
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::string format = "json";
  std::string out;
};

/// Thrown for bad command-line values; maps to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double default_tol() {
  const char* env = std::getenv("ISOGRAPH_TOL");
  if (env == nullptr || *env == '\0') return kDefaultTol;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (*end != '\0' || !(v > 0.0)) throw UsageError(std::string("ISOGRAPH_TOL is not a positive number: ") + env);
  return v;
}

Complex parse_complex(const std::string& s) {
  std::istringstream in(s);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(in >> re)) throw UsageError("bad complex value: " + s);
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw UsageError("bad complex value: " + s);
  }
  if (in >> comma) throw UsageError("bad complex value: " + s);
  return {re, im};
}

VertexList to_slots(const std::vector<long long>& one_based) {
  VertexList out;
  for (long long v : one_based) {
    if (v < 1) throw UsageError("vertex ids start at 1");
    out.push_back(Vertex(v - 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

json one_based(const VertexList& vs) {
  json j = json::array();
  for (Vertex v : vs) j.push_back(v + 1);
  return j;
}

json complex_matrix(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json real_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

std::string fmt(Complex z) {
  char buf[64];
  if (z.imag() == 0.0)
    std::snprintf(buf, sizeof buf, "%.6g", z.real());
  else
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string list(const VertexList& vs) {
  std::string s;
  for (Vertex v : vs) s += (s.empty() ? "" : " ") + std::to_string(v + 1);
  return "{" + s + "}";
}

/// Writes the report in the chosen format to --out or stdout.
void emit(const Global& g, const json& j, const std::string& table) {
  const std::string text = g.format == "json" ? j.dump(2) + "\n" : table;
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw UsageError("cannot write " + g.out);
  f << text;
}

WeightedDigraph read_graph(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("no such graph file: " + path);
  return load_graph(path);
}

/// Loads a graph and sets the stochastic flag when its columns allow it.
WeightedDigraph read_maybe_stochastic(const std::string& path) {
  auto g = read_graph(path);
  try {
    g.mark_stochastic();
  } catch (const Error&) {
  }
  return g;
}

StructuralSet structural_for(const WeightedDigraph& g, const std::vector<long long>& set, Complex lambda,
                             double tol) {
  if (set.empty()) return find_structural_set(g, lambda, tol);
  return compute_depths(g, to_slots(set), lambda, tol);
}

json depths_json(const WeightedDigraph& g, const StructuralSet& s) {
  json j = json::object();
  for (Vertex v : g.live_vertices()) j[std::to_string(v + 1)] = s.depth_of[v];
  return j;
}

// ---------------------------------------------------------------------------
// reduce

struct ReduceArgs {
  std::string graph;
  std::string lambda = "1";
  std::vector<long long> set;
  bool by_length = false;
};

int cmd_reduce(const Global& gl, const ReduceArgs& a) {
  const auto g = read_maybe_stochastic(a.graph);
  const Complex lambda = parse_complex(a.lambda);
  const auto s = structural_for(g, a.set, lambda, gl.tol);
  const auto branches = enumerate_branches(g, s);
  const auto r = reduced_matrix(g, s, branches, lambda, gl.tol);

  json j{{"n", g.live_count()},
         {"lambda", complex_to_json(lambda)},
         {"structural_set", one_based(s.members)},
         {"depths", depths_json(g, s)},
         {"max_depth", s.max_depth},
         {"branch_count", branches.size()},
         {"reduced", complex_matrix(r.entries)}};
  if (a.by_length) {
    json parts = json::array();
    const std::size_t max_len = s.complement().size() + 1;
    for (std::size_t p = 1; p <= max_len; ++p)
      parts.push_back({{"length", p}, {"matrix", complex_matrix(reduced_matrix_by_length(g, s, lambda, p, gl.tol))}});
    j["by_length"] = parts;
  }
  if (g.stochastic() && lambda == Complex(1.0, 0.0)) j["extended"] = real_matrix(extended_reduced_matrix(g, s, branches).entries);

  std::ostringstream t;
  t << "N " << g.live_count() << "  lambda " << fmt(lambda) << "\n";
  t << "S " << list(s.members) << "  depth " << s.max_depth << "  branches " << branches.size() << "\n";
  t << "R_S:\n";
  for (Eigen::Index i = 0; i < r.entries.rows(); ++i) {
    t << "  ";
    for (Eigen::Index k = 0; k < r.entries.cols(); ++k) t << fmt(r.entries(i, k)) << (k + 1 < r.entries.cols() ? "  " : "\n");
  }
  emit(gl, j, t.str());
  return kOk;
}

// ---------------------------------------------------------------------------
// lift

struct LiftArgs {
  std::string graph;
  std::string lambda = "1";
  std::vector<long long> set;
  std::string norm = "l2";
};

int cmd_lift(const Global& gl, const LiftArgs& a) {
  const auto g = read_maybe_stochastic(a.graph);
  const Complex lambda = parse_complex(a.lambda);
  const auto s = structural_for(g, a.set, lambda, gl.tol);
  const auto r = reduced_matrix(g, s, lambda, gl.tol);

  const Eigen::Index n = r.entries.rows();
  const Eigen::MatrixXcd shifted = r.entries - lambda * Eigen::MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
  const double sigma = svd.singularValues()(n - 1);
  const double scale = std::max(1.0, r.entries.norm());
  const Eigen::VectorXcd u_s = svd.matrixV().col(n - 1);

  const auto pair = lift_eigenvector(g, s, lambda, u_s, a.norm == "l1" ? Normalization::L1Positive : Normalization::L2Unit,
                                     gl.tol);
  // Residual of the lifted vector against M_G on the live vertices.
  const auto live = g.live_vertices();
  const Eigen::MatrixXcd dense = g.dense();
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(dense.rows());
  for (std::size_t k = 0; k < live.size(); ++k) full(Eigen::Index(live[k])) = pair.vector(Eigen::Index(k));
  const double residual = (dense * full - lambda * full).norm() / std::max(full.norm(), 1e-300);
  const bool eigen = sigma <= 1e-8 * scale;

  json j{{"lambda", complex_to_json(lambda)},
         {"structural_set", one_based(s.members)},
         {"reduced_singular_min", sigma},
         {"is_eigenvalue", eigen},
         {"residual", residual},
         {"eigenvector", pair.to_json()}};
  std::ostringstream t;
  t << "lambda " << fmt(lambda) << "  S " << list(s.members) << "\n";
  t << "sigma_min(R - lambda I) " << fmt(sigma) << (eigen ? "" : "  (not an eigenvalue)") << "\n";
  t << "||M u - lambda u|| / ||u|| " << fmt(residual) << "\n";
  for (std::size_t k = 0; k < live.size(); ++k) t << "  u[" << live[k] + 1 << "] = " << fmt(pair.vector(Eigen::Index(k))) << "\n";
  emit(gl, j, t.str());
  if (!eigen) {
    std::cerr << "isograph: lambda " << fmt(lambda) << " is not an eigenvalue of R_S (sigma_min " << fmt(sigma) << ")\n";
    return kInvariant;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// update

struct UpdateArgs {
  std::string graph;
  std::string state;
  std::vector<long long> set;
  std::string delta;
  std::size_t random = 0;
  std::size_t ell = 10;
  std::string save;
  bool check = false;
};

int cmd_update(const Global& gl, const UpdateArgs& a) {
  StoredState base;
  if (!a.state.empty()) {
    if (!fs::is_directory(a.state)) throw UsageError("no such state directory: " + a.state);
    base = StoredState::load(a.state);
  } else {
    auto g = read_graph(a.graph);
    g.mark_stochastic();
    base = a.set.empty() ? StoredState::build(std::move(g)) : StoredState::build(std::move(g), to_slots(a.set));
  }

  GraphDelta delta;
  if (!a.delta.empty()) {
    if (!fs::exists(a.delta)) throw UsageError("no such delta file: " + a.delta);
    delta = load_delta(a.delta);
  } else if (a.random > 0) {
    Rng rng(gl.seed);
    delta = random_delta(base, a.random, rng);
  }

  const auto out = update(base, delta);
  const auto report = cost_report(base, out.state, delta, out.log, a.ell);

  json j{{"delta", delta.to_json()},
         {"structural_set", one_based(out.state.structural.members)},
         {"promotions", out.log.promotions()},
         {"structural_fallback", out.log.structural_fallback},
         {"power_converged", out.log.power_converged},
         {"eigen_residual", out.log.eigen_residual},
         {"cost", report.to_json()},
         {"eigenvector", out.state.dominant.to_json()}};
  std::ostringstream t;
  t << "ops " << delta.ops.size() << "  S' " << list(out.state.structural.members) << "  promotions "
    << out.log.promotions() << (out.log.structural_fallback ? "  (fallback)" : "") << "\n";
  t << report.table();

  int status = kOk;
  if (a.check) {
    const auto scratch = scratch_update(base, delta);
    const bool match = states_match(out.state, scratch);
    const auto issues = check_consistency(out.state, std::max(gl.tol, 1e-12));
    json list = json::array();
    for (const auto& i : issues) list.push_back({{"invariant", i.invariant}, {"detail", i.detail}});
    j["check"] = {{"matches_scratch", match}, {"consistency_issues", list}};
    t << "matches scratch: " << (match ? "yes" : "NO") << "  consistency issues: " << issues.size() << "\n";
    for (const auto& i : issues) {
      t << "  " << i.invariant << ": " << i.detail << "\n";
      std::cerr << "isograph: invariant " << i.invariant << " failed: " << i.detail << "\n";
    }
    if (!match) std::cerr << "isograph: invariant incremental-equals-scratch failed\n";
    if (!match || !issues.empty()) status = kInvariant;
  }
  if (!a.save.empty()) out.state.save(a.save);
  emit(gl, j, t.str());
  return status;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string graph;
  std::vector<long long> set;
  std::size_t steps = 100000;
  std::size_t streams = 4;
  long long start = 1;
};

int cmd_simulate(const Global& gl, const SimulateArgs& a) {
  const auto g = read_graph(a.graph);
  const auto chain = MarkovChain::from_column_stochastic(g);
  const auto s = structural_for(chain.transition_graph(), a.set, 1.0, gl.tol).members;
  if (a.start < 1 || std::size_t(a.start) > chain.states()) throw UsageError("--start is out of range");
  if (a.streams == 0) throw UsageError("--streams must be positive");

  const auto sample = simulate_stopped_chain_parallel(chain, s, a.steps, gl.seed, Vertex(a.start - 1), a.streams);
  const auto expected = reduced_transition(chain, s);
  const auto bands = check_bands(sample, expected);

  json j{{"structural_set", one_based(s)},
         {"steps_per_stream", a.steps},
         {"streams", a.streams},
         {"visits", sample.visits.size()},
         {"counts", real_matrix(sample.counts)},
         {"empirical", real_matrix(sample.empirical())},
         {"expected", real_matrix(expected)},
         {"within_3_sigma", bands.within},
         {"entries", bands.entries},
         {"total_variation", bands.total_variation}};
  if (chain.irreducible()) j["stationary_restriction_gap"] = verify_stationary_restriction(chain, s);

  std::ostringstream t;
  t << "S " << list(s) << "  visits " << sample.visits.size() << "  within 3 sigma " << bands.within << "/"
    << bands.entries << "  max TV " << fmt(bands.total_variation) << "\n";
  for (Eigen::Index r = 0; r < expected.rows(); ++r) {
    t << "  " << s[std::size_t(r)] + 1 << ":";
    for (Eigen::Index c = 0; c < expected.cols(); ++c)
      t << "  " << fmt(sample.empirical()(r, c)) << " (" << fmt(expected(r, c)) << ")";
    t << "\n";
  }
  emit(gl, j, t.str());
  return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  ExperimentConfig cfg;
  std::vector<std::size_t> sweep;
  std::string csv;
  std::string plot_dir;
  std::size_t bins = 20;
  bool serial = false;
  bool timing = false;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw UsageError("cannot write " + p.string());
  f << text;
}

/// Savings histogram over [0, 1] with an extra bin for negative savings.
json histogram(const ExperimentResult& r, std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  std::size_t below = 0;
  for (const auto& t : r.trials) {
    const double x = t.report.savings;
    if (x < 0.0) {
      ++below;
      continue;
    }
    counts[std::min(bins - 1, std::size_t(x * double(bins)))]++;
  }
  json rows = json::array();
  rows.push_back({{"lo", nullptr}, {"hi", 0.0}, {"count", below}});
  for (std::size_t b = 0; b < bins; ++b)
    rows.push_back({{"lo", double(b) / double(bins)}, {"hi", double(b + 1) / double(bins)}, {"count", counts[b]}});
  return rows;
}

json sweep_row(std::size_t n, const ExperimentResult& r) {
  double s = 0, k = 0, m = 0, sav = 0;
  for (const auto& t : r.trials) {
    s += double(t.report.before.s);
    k += double(t.report.before.k);
    m += double(t.report.before.m);
    sav += t.report.savings;
  }
  const double c = std::max<double>(1.0, double(r.trials.size()));
  return {{"N", n},
          {"trials", r.trials.size()},
          {"mean_s", s / c},
          {"mean_k", k / c},
          {"mean_m", m / c},
          {"mean_savings", sav / c},
          {"fraction_above_threshold", r.fraction_above_threshold()}};
}

int cmd_bench(const Global& gl, BenchArgs a) {
  a.cfg.seed = gl.seed;
  validate(a.cfg);
  if (a.bins == 0) throw UsageError("--bins must be positive");
  const auto run = [&](const ExperimentConfig& c) { return a.serial ? run_experiment_serial(c) : run_experiment(c); };

  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run(a.cfg);
  json j = r.to_json();
  j["histogram"] = histogram(r, a.bins);

  json sweep = json::array();
  for (std::size_t n : a.sweep) {
    auto c = a.cfg;
    c.n = n;
    validate(c);
    sweep.push_back(sweep_row(n, run(c)));
  }
  if (!a.sweep.empty()) j["sweep"] = sweep;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!a.csv.empty()) write_file(a.csv, r.to_csv());
  if (!a.plot_dir.empty()) {
    fs::create_directories(a.plot_dir);
    const fs::path dir(a.plot_dir);
    std::ostringstream h;
    h << "lo,hi,count\n";
    for (const auto& row : j["histogram"])
      h << (row["lo"].is_null() ? std::string("-inf") : fmt(row["lo"].get<double>())) << "," << fmt(row["hi"].get<double>())
        << "," << row["count"].get<std::size_t>() << "\n";
    write_file(dir / "savings_histogram.csv", h.str());
    write_file(dir / "savings_histogram.json", j["histogram"].dump(2) + "\n");
    std::ostringstream s;
    s << "N,trials,mean_s,mean_k,mean_m,mean_savings,fraction_above_threshold\n";
    for (const auto& row : sweep)
      s << row["N"].get<std::size_t>() << "," << row["trials"].get<std::size_t>() << "," << fmt(row["mean_s"].get<double>())
        << "," << fmt(row["mean_k"].get<double>()) << "," << fmt(row["mean_m"].get<double>()) << ","
        << fmt(row["mean_savings"].get<double>()) << "," << fmt(row["fraction_above_threshold"].get<double>()) << "\n";
    write_file(dir / "skm_vs_n.csv", s.str());
    write_file(dir / "skm_vs_n.json", sweep.dump(2) + "\n");
  }
  if (a.timing) j["timing"] = {{"seconds", secs}};

  std::ostringstream t;
  t << "N " << a.cfg.n << "  trials " << r.trials.size() << " (+" << r.failures.size() << " failed)  p " << a.cfg.p
    << "  ell " << a.cfg.ell << "  seed " << a.cfg.seed << "\n";
  t << "savings mean " << fmt(r.mean_savings()) << "  median " << fmt(r.median_savings()) << "  above "
    << fmt(a.cfg.threshold) << ": " << fmt(r.fraction_above_threshold()) << "\n";
  t << "bounds hold " << fmt(r.fraction_bounds_hold()) << "  scale conditions " << fmt(r.fraction_meeting_conditions())
    << "  matches scratch " << fmt(r.fraction_matching_scratch()) << "\n";
  for (const auto& row : sweep)
    t << "  N " << row["N"].get<std::size_t>() << ": s " << fmt(row["mean_s"].get<double>()) << "  k "
      << fmt(row["mean_k"].get<double>()) << "  m " << fmt(row["mean_m"].get<double>()) << "  savings "
      << fmt(row["mean_savings"].get<double>()) << "\n";
  if (a.timing) t << "time " << fmt(secs) << " s\n";
  emit(gl, j, t.str());

  const bool ok = r.fraction_matching_scratch() == 1.0;
  if (!ok) std::cerr << "isograph: invariant incremental-equals-scratch failed\n";
  return ok ? kOk : kInvariant;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  std::string target;
  bool pass = true;
  double value = 0.0;
  std::string detail;
};

class Verifier {
 public:
  explicit Verifier(const Global& gl) : gl_(gl) {}

  void graph(const std::string& target, WeightedDigraph g, std::uint64_t seed) {
    theorem1(target, g);
    if (!g.is_column_stochastic()) return;
    g.mark_stochastic();
    return_identity(target, g);
    stationary(target, g);
    incremental(target, g, seed);
  }

  void state(const std::string& target, const StoredState& st) {
    const auto issues = check_consistency(st, std::max(gl_.tol, 1e-12));
    if (issues.empty()) {
      add({"stored-vs-recomputed", target, true, 0.0, "all stored quantities match"});
    } else {
      for (const auto& i : issues) add({"stored-vs-recomputed:" + i.invariant, target, false, 0.0, i.detail});
    }
  }

  void lemma(std::uint64_t seed) {
    Rng rng(seed);
    double worst = -1.0;
    std::size_t samples = 0;
    for (std::size_t m = 1; m <= 12; ++m) {
      for (int t = 0; t < 200; ++t, ++samples) {
        const double n = rng.uniform(1.0, 100.0);
        std::vector<double> x(m + 1);
        for (std::size_t i = 0; i < m; ++i) x[i] = rng.uniform(0.0, n);
        x[m] = n;
        std::sort(x.begin(), x.begin() + std::ptrdiff_t(m));
        const auto b = simplex_bound(x);
        worst = std::max(worst, b.value / b.bound);
      }
    }
    add({"simplex-lemma", "random samples", worst <= 1.0 + 1e-12, worst,
         std::to_string(samples) + " samples, max F / bound"});
  }

  const std::vector<Check>& checks() const { return checks_; }

 private:
  void add(Check c) { checks_.push_back(std::move(c)); }

  void theorem1(const std::string& target, const WeightedDigraph& g) {
    const auto live = g.live_vertices();
    Eigen::MatrixXcd m(Eigen::Index(live.size()), Eigen::Index(live.size()));
    const Eigen::MatrixXcd full = g.dense();
    for (std::size_t r = 0; r < live.size(); ++r)
      for (std::size_t c = 0; c < live.size(); ++c) m(Eigen::Index(r), Eigen::Index(c)) = full(Eigen::Index(live[r]), Eigen::Index(live[c]));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    const auto& vals = es.eigenvalues();
    double worst_res = 0.0, worst_col = 0.0;
    std::size_t pairs = 0;
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
      bool simple = true;
      for (Eigen::Index o = 0; o < vals.size(); ++o)
        if (o != k && std::abs(vals(o) - vals(k)) < 1e-6) simple = false;
      if (!simple) continue;
      StructuralSet s;
      try {
        s = find_structural_set(g, vals(k), gl_.tol, 0.1);
      } catch (const Error&) {
        continue;
      }
      EigenPair eig{vals(k), live, es.eigenvectors().col(k), Normalization::L2Unit};
      const auto t1 = verify_theorem1(g, s, eig, gl_.tol);
      if (t1.degenerate) continue;
      Eigen::VectorXcd u_s(Eigen::Index(s.size()));
      for (std::size_t i = 0; i < s.size(); ++i) u_s(Eigen::Index(i)) = eig.at(s.members[i]);
      const auto lifted = lift_eigenvector(g, s, vals(k), u_s, Normalization::L2Unit, gl_.tol);
      const double cosine = std::abs(lifted.vector.dot(eig.vector)) / (lifted.vector.norm() * eig.vector.norm());
      worst_res = std::max(worst_res, t1.residual);
      worst_col = std::max(worst_col, 1.0 - cosine);
      ++pairs;
    }
    add({"theorem1-restriction", target, pairs > 0 && worst_res < 1e-9, worst_res,
         std::to_string(pairs) + " eigenpairs, max ||R u_S - lambda u_S|| / ||u_S||"});
    add({"theorem1-lift", target, pairs > 0 && worst_col < 1e-9, worst_col, "max 1 - |cos| against the dense eigenvector"});
  }

  void return_identity(const std::string& target, const WeightedDigraph& g) {
    const auto s = find_structural_set(g, 1.0, gl_.tol);
    const auto rep = verify_return_identity(g, s);
    const double v = std::max({rep.max_by_length, rep.max_total, rep.max_tail});
    add({"taboo-identity", target, v < 1e-12, v, "R^(n) against taboo probabilities, S " + list(s.members)});
  }

  void stationary(const std::string& target, const WeightedDigraph& g) {
    const auto chain = MarkovChain::from_column_stochastic(g);
    const auto s = find_structural_set(chain.transition_graph(), 1.0, gl_.tol).members;
    const double gap = verify_stationary_restriction(chain, s);
    add({"stationary-restriction", target, gap < 1e-10, gap, "stationary of R_S against restricted stationary"});
  }

  void incremental(const std::string& target, const WeightedDigraph& g, std::uint64_t seed) {
    const auto base = StoredState::build(g);
    Rng rng(seed);
    GraphDelta delta;
    try {
      delta = random_delta(base, std::min<std::size_t>(3, base.graph.live_count()), rng);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::GenerationFailed) throw;
      add({"incremental-equals-scratch", target, true, 0.0, "skipped: no admissible delta"});
      return;
    }
    const auto out = update(base, delta);
    const bool match = states_match(out.state, scratch_update(base, delta));
    const auto issues = check_consistency(out.state);
    std::string detail = std::to_string(delta.ops.size()) + " ops, " + std::to_string(out.log.promotions()) + " promotions";
    for (const auto& i : issues) detail += "; " + i.invariant + ": " + i.detail;
    add({"incremental-equals-scratch", target, match && issues.empty(), out.log.eigen_residual, detail});
  }

  const Global& gl_;
  std::vector<Check> checks_;
};

WeightedDigraph builtin_three_cycle() {
  WeightedDigraph g(3);
  for (Vertex v = 0; v < 3; ++v) g.set_weight(v, (v + 1) % 3, 1.0);
  return g;
}

struct VerifyArgs {
  std::vector<std::string> graphs;
  std::string state;
  std::size_t seeds = 10;
  std::size_t n = 12;
};

int cmd_verify(const Global& gl, const VerifyArgs& a) {
  Verifier v(gl);
  if (a.graphs.empty() && a.state.empty()) v.graph("builtin:3-cycle", builtin_three_cycle(), gl.seed);
  for (const auto& path : a.graphs) v.graph(path, read_graph(path), gl.seed);
  if (!a.state.empty()) {
    if (!fs::is_directory(a.state)) throw UsageError("no such state directory: " + a.state);
    v.state(a.state, StoredState::load(a.state));
  }
  for (std::size_t k = 0; k < a.seeds; ++k) {
    const std::uint64_t seed = derive_seed(gl.seed, k);
    GeneratorOptions opts;
    opts.n = a.n;
    v.graph("seed:" + std::to_string(seed), generate_random_graph(opts, seed), seed);
  }
  v.lemma(gl.seed);

  json list = json::array();
  std::size_t failed = 0;
  std::ostringstream t;
  for (const auto& c : v.checks()) {
    list.push_back({{"name", c.name}, {"target", c.target}, {"pass", c.pass}, {"value", c.value}, {"detail", c.detail}});
    t << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  " << c.target << "  " << fmt(c.value) << "  " << c.detail << "\n";
    if (!c.pass) {
      ++failed;
      std::cerr << "isograph: invariant " << c.name << " failed on " << c.target << ": " << c.detail << "\n";
    }
  }
  t << v.checks().size() - failed << " passed, " << failed << " failed\n";
  emit(gl, {{"checks", list}, {"passed", v.checks().size() - failed}, {"failed", failed}}, t.str());
  return failed == 0 ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  Global gl;
  try {
    gl.tol = default_tol();
  } catch (const UsageError& e) {
    std::cerr << "isograph: " << e.what() << "\n";
    return kInvalid;
  }

  CLI::App app{"Isospectral graph reduction and incremental dominant-eigenvector updates"};
  app.require_subcommand(1);
  app.add_option("--seed", gl.seed, "RNG seed")->capture_default_str();
  app.add_option("--tol", gl.tol, "structural / singularity tolerance (default ISOGRAPH_TOL or 1e-12)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", gl.format, "report format")->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  app.add_option("--out", gl.out, "write the report here instead of stdout");

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "structural set, depths and reduced matrix");
  reduce->add_option("graph", ra.graph, "graph file (edge list or JSON)")->required();
  reduce->add_option("--lambda", ra.lambda, "spectral parameter, re or re,im")->capture_default_str();
  reduce->add_option("--set", ra.set, "structural set (default: greedy search)")->delimiter(',');
  reduce->add_flag("--by-length", ra.by_length, "also emit R^(p) for every branch length p");

  LiftArgs la;
  auto* lift = app.add_subcommand("lift", "eigenvector of M_G from the reduced matrix");
  lift->add_option("graph", la.graph, "graph file")->required();
  lift->add_option("--lambda", la.lambda, "eigenvalue, re or re,im")->capture_default_str();
  lift->add_option("--set", la.set, "structural set (default: greedy search)")->delimiter(',');
  lift->add_option("--norm", la.norm, "normalization")->check(CLI::IsMember({"l1", "l2"}))->capture_default_str();

  UpdateArgs ua;
  auto* upd = app.add_subcommand("update", "apply a delta to a stored state and report costs");
  auto* src_graph = upd->add_option("--graph", ua.graph, "column-stochastic graph to build the state from");
  auto* src_state = upd->add_option("--state", ua.state, "stored state directory");
  src_graph->excludes(src_state);
  upd->add_option("--set", ua.set, "structural set when building from --graph")->delimiter(',')->needs(src_graph);
  auto* d_file = upd->add_option("--delta", ua.delta, "delta file (JSON)");
  upd->add_option("--random", ua.random, "draw a random delta of this many ops")->excludes(d_file);
  upd->add_option("--ell", ua.ell, "iteration count of the full re-iteration baseline")->capture_default_str();
  upd->add_option("--save", ua.save, "write the updated state here");
  upd->add_flag("--check", ua.check, "compare with a scratch rebuild and recheck every stored quantity");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "stopped-chain simulation against the reduced kernel");
  sim->add_option("graph", sa.graph, "column-stochastic graph (the chain is its transpose)")->required();
  sim->add_option("--set", sa.set, "states observed (default: greedy structural set)")->delimiter(',');
  sim->add_option("--steps", sa.steps, "transitions per stream")->capture_default_str();
  sim->add_option("--streams", sa.streams, "independent streams")->capture_default_str();
  sim->add_option("--start", sa.start, "initial state")->capture_default_str();

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "random-graph cost-savings experiment");
  bench->add_option("--n", ba.cfg.n, "vertices")->capture_default_str();
  bench->add_option("--degree-lo", ba.cfg.degree_lo, "lowest average out-degree")->capture_default_str();
  bench->add_option("--degree-hi", ba.cfg.degree_hi, "highest average out-degree")->capture_default_str();
  bench->add_option("--p", ba.cfg.p, "ops per delta")->capture_default_str();
  bench->add_option("--ell", ba.cfg.ell, "iteration cap of the baseline")->capture_default_str();
  bench->add_option("--trials", ba.cfg.trials, "trials")->capture_default_str();
  bench->add_option("--ratio", ba.cfg.ratio, "a << b means a <= ratio * b")->capture_default_str();
  bench->add_option("--threshold", ba.cfg.threshold, "savings threshold")->capture_default_str();
  bench->add_option("--sweep", ba.sweep, "also run at these N for s/k/m vs N")->delimiter(',');
  bench->add_option("--csv", ba.csv, "per-trial CSV");
  bench->add_option("--plot-dir", ba.plot_dir, "histogram and sweep series as CSV and JSON");
  bench->add_option("--bins", ba.bins, "histogram bins over [0, 1]")->capture_default_str();
  bench->add_flag("--serial", ba.serial, "run trials on one thread");
  bench->add_flag("--timing", ba.timing, "add wall time to the report");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "run the invariant checks");
  ver->add_option("graphs", va.graphs, "graph files (default: the built-in 3-cycle)");
  ver->add_option("--state", va.state, "stored state directory to recheck");
  ver->add_option("--seeds", va.seeds, "random graphs in the seed sweep")->capture_default_str();
  ver->add_option("--n", va.n, "vertices of the sweep graphs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*reduce) return cmd_reduce(gl, ra);
    if (*lift) return cmd_lift(gl, la);
    if (*upd) {
      if (ua.graph.empty() && ua.state.empty()) throw UsageError("update needs --graph or --state");
      return cmd_update(gl, ua);
    }
    if (*sim) return cmd_simulate(gl, sa);
    if (*bench) return cmd_bench(gl, ba);
    if (*ver) return cmd_verify(gl, va);
  } catch (const UsageError& e) {
    std::cerr << "isograph: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    std::cerr << "isograph: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::InvalidInput:
      case ErrorKind::InvalidMode:
      case ErrorKind::NotStructural:
      case ErrorKind::RejectedDelta:
        return kInvalid;
      default:
        return kInvariant;
    }
  } catch (const json::exception& e) {
    std::cerr << "isograph: malformed JSON: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "isograph: " << e.what() << "\n";
    return kInvariant;
  }
  return kOk;
}
