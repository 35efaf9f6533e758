#include <benchmark/benchmark.h>

#include <reconstruct/reconstruct.hpp>

using namespace recon;

namespace {

void BM_KnotCriterion(benchmark::State& state) {
  const MatrixXd a = uniform_points(state.range(0), 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(knot_criterion(a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnotCriterion)->RangeMultiplier(2)->Range(10, 160)->Complexity(benchmark::oNSquared);

// CCPP-sized candidate pool: 40 of 9000 points in [0,1]^4.
void BM_SelectKnots(benchmark::State& state) {
  const MatrixXd x = uniform_points(9000, 4, 3);
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) {
    KnotSelection s = select_knots(x, 40, state.range(0), 7, jobs);
    benchmark::DoNotOptimize(s.criterion);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectKnots)->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);

void BM_SplineFit(benchmark::State& state) {
  const VectorXd knots = equispaced_knots(state.range(0));
  const VectorXd gamma = evaluate_function(TestFunctionId::f1d, knots);
  for (auto _ : state) {
    SplineCoefficients s = fit_cubic_spline(knots, gamma);
    benchmark::DoNotOptimize(s.a.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SplineFit)->RangeMultiplier(8)->Range(8, 1 << 15)->Complexity(benchmark::oN);

void BM_LagrangeEval(benchmark::State& state) {
  const VectorXd knots = chebyshev_knots(state.range(0));
  const LagrangeInterpolator interp(knots);
  const VectorXd gamma = evaluate_function(TestFunctionId::f1d, knots);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interp(gamma, x));
    x = x < 1.0 ? x + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_LagrangeEval)->Arg(7)->Arg(14)->Arg(50);

}  // namespace
