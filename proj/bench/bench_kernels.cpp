// Serial reference against OpenMP kernels, and incremental update against the
// full re-iteration it replaces.

#include <benchmark/benchmark.h>

#include <vector>

#include "isograph/branches.hpp"
#include "isograph/experiment.hpp"
#include "isograph/generator.hpp"
#include "isograph/incremental.hpp"
#include "isograph/markov.hpp"
#include "isograph/sparse.hpp"
#include "isograph/spectral.hpp"
#include "isograph/structural.hpp"

using namespace isograph;

namespace {

WeightedDigraph graph(std::size_t n, bool primitive = true) {
  GeneratorOptions opts;
  opts.n = n;
  opts.avg_out_degree = 2.5;
  opts.require_primitive = primitive;
  return generate_random_graph(opts, 42);
}

template <BranchSet (*Enumerate)(const WeightedDigraph&, const StructuralSet&, BranchFilter)>
void branches(benchmark::State& state) {
  const auto g = graph(std::size_t(state.range(0)));
  const auto s = find_structural_set(g, 1.0);
  std::size_t count = 0;
  for (auto _ : state) {
    auto b = Enumerate(g, s, {});
    count = b.size();
    benchmark::DoNotOptimize(count);
  }
  state.counters["branches"] = double(count);
  state.counters["s"] = double(s.size());
}

template <void (*Kernel)(const CsrMatrix&, std::span<const double>, std::span<double>)>
void spmv_kernel(benchmark::State& state) {
  const auto g = graph(std::size_t(state.range(0)), false);
  const auto a = CsrMatrix::from_graph(g, g.live_vertices());
  std::vector<double> x(a.rows, 1.0 / double(a.rows)), y(a.rows);
  for (auto _ : state) {
    Kernel(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(a.nonzeros()));
}

void stopped_chain_serial(benchmark::State& state) {
  const auto chain = MarkovChain::from_column_stochastic(graph(60));
  const auto s = find_structural_set(chain.transition_graph(), 1.0).members;
  const std::size_t steps = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_stopped_chain(chain, s, 4 * steps, 7, 0).visits.size());
}

void stopped_chain_parallel(benchmark::State& state) {
  const auto chain = MarkovChain::from_column_stochastic(graph(60));
  const auto s = find_structural_set(chain.transition_graph(), 1.0).members;
  const std::size_t steps = std::size_t(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_stopped_chain_parallel(chain, s, steps, 7, 0, 4).visits.size());
}

ExperimentConfig experiment_config() {
  ExperimentConfig cfg;
  cfg.trials = 16;
  cfg.compare_scratch = false;
  return cfg;
}

void experiment_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(experiment_config()).mean_savings());
}

void experiment_parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(experiment_config()).mean_savings());
}

struct UpdateCase {
  StoredState base;
  GraphDelta delta;
};

UpdateCase update_case(std::size_t n) {
  auto base = StoredState::build(graph(n));
  Rng rng(5);
  auto delta = random_delta(base, 3, rng, {1.0, 0.0, 0.0, 0.0, false});
  return {std::move(base), std::move(delta)};
}

/// Steps 1 to 6 on a session; copying the stored state into the session is not timed.
void incremental_update(benchmark::State& state) {
  const auto c = update_case(std::size_t(state.range(0)));
  for (auto _ : state) {
    state.PauseTiming();
    UpdateSession session(c.base);
    state.ResumeTiming();
    session.apply(c.delta);
    session.refresh_eigen();
    benchmark::DoNotOptimize(session.state().dominant.vector.data());
  }
}

void copy_stored_state(benchmark::State& state) {
  const auto c = update_case(std::size_t(state.range(0)));
  for (auto _ : state) {
    UpdateSession session(c.base);
    benchmark::DoNotOptimize(&session);
  }
}

void scratch_rebuild(benchmark::State& state) {
  const auto c = update_case(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scratch_update(c.base, c.delta).dominant.vector.data());
}

/// The baseline of the cost model: power iteration on the full updated matrix.
void full_power_iteration(benchmark::State& state) {
  const auto c = update_case(std::size_t(state.range(0)));
  auto g = c.base.graph;
  for (const auto& op : c.delta.ops) apply_graph_op(g, op);
  const auto a = CsrMatrix::from_graph(g, g.live_vertices());
  PowerIterationOptions opts;
  opts.primitivity = PowerIterationOptions::Primitivity::Attested;
  opts.max_iters = 100000;
  opts.tol = 1e-14;
  std::size_t iterations = 0;
  for (auto _ : state) {
    auto r = power_iteration(a, opts);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.pair.vector.data());
  }
  state.counters["iterations"] = double(iterations);
}

}  // namespace

BENCHMARK_TEMPLATE(branches, enumerate_branches_serial)->Name("branches/serial")->Arg(60)->Arg(120);
BENCHMARK_TEMPLATE(branches, enumerate_branches)->Name("branches/omp")->Arg(60)->Arg(120);
BENCHMARK_TEMPLATE(spmv_kernel, spmv_serial)->Name("spmv/serial")->Arg(1000)->Arg(100000);
BENCHMARK_TEMPLATE(spmv_kernel, spmv)->Name("spmv/omp")->Arg(1000)->Arg(100000);
BENCHMARK(stopped_chain_serial)->Name("stopped_chain/serial")->Arg(10000);
BENCHMARK(stopped_chain_parallel)->Name("stopped_chain/omp")->Arg(10000);
BENCHMARK(experiment_serial)->Name("experiment/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(experiment_parallel)->Name("experiment/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(incremental_update)->Name("update/incremental")->Arg(60)->Arg(90)->Unit(benchmark::kMicrosecond);
BENCHMARK(copy_stored_state)->Name("update/copy_state")->Arg(60)->Arg(90)->Unit(benchmark::kMicrosecond);
BENCHMARK(scratch_rebuild)->Name("update/scratch")->Arg(60)->Arg(90)->Unit(benchmark::kMicrosecond);
BENCHMARK(full_power_iteration)->Name("update/full_power_iteration")->Arg(60)->Arg(90)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
