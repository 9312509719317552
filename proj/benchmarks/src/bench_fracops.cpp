#include <benchmark/benchmark.h>

#include <cmath>

#include "fracvar/fracops.hpp"
#include "fracvar/solver.hpp"
#include "fracvar/variational.hpp"

using namespace fracvar;

namespace {

SampledFunction smooth(std::size_t n) {
  const Grid g(0.0, 1.0, n);
  return SampledFunction::sample(
      g, [](double x) { return x * x * (1.0 - x) * std::sin(5.0 * x); });
}

void bm_cfd_left(benchmark::State& state) {
  const SampledFunction f = smooth(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cfd_left(f, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_cfd_left)->Range(128, 4096)->Complexity(benchmark::oNSquared);

void bm_combined_caputo(benchmark::State& state) {
  const SampledFunction f = smooth(static_cast<std::size_t>(state.range(0)));
  const FracParams p(0.6, 0.7, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(combined_caputo(f, p));
}
BENCHMARK(bm_combined_caputo)->Range(128, 4096);

void bm_operator_matrix(benchmark::State& state) {
  const Grid g(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
  const FracParams p(0.6, 0.7, 0.4);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        build_operator_matrix(OperatorKind::CombinedCaputo, g, p));
}
BENCHMARK(bm_operator_matrix)->Range(128, 2048);

Problem quadratic_problem(std::size_t n) {
  Problem p{FracParams(0.6, 0.7, 0.4),
            Grid(0.0, 1.0, n),
            1,
            parse("v^2 + y^2", 1),
            {},
            {},
            {BoundaryCondition{}},
            {},
            {}};
  p.boundary[0].right = 1.0;
  return p;
}

void bm_evaluate_functional(benchmark::State& state) {
  const Problem p = quadratic_problem(static_cast<std::size_t>(state.range(0)));
  const Trajectory y = initial_trajectory(p);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_functional(p, y));
}
BENCHMARK(bm_evaluate_functional)->Range(128, 2048);

void bm_functional_gradient(benchmark::State& state) {
  const Problem p = quadratic_problem(static_cast<std::size_t>(state.range(0)));
  const Trajectory y = initial_trajectory(p);
  for (auto _ : state) benchmark::DoNotOptimize(functional_gradient(p, y));
}
BENCHMARK(bm_functional_gradient)->Range(128, 2048);

void bm_solve_basic(benchmark::State& state) {
  const Problem p = quadratic_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_basic(p));
}
BENCHMARK(bm_solve_basic)->Range(101, 401)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
