#include <benchmark/benchmark.h>

#include <reconstruct/reconstruct.hpp>

using namespace recon;

namespace {

VectorXd noisy_f1d(Index n) {
  const MatrixXd x = VectorXd::LinSpaced(n, 0.0, 1.0);
  Rng rng(mix_seed(1));
  VectorXd y = evaluate_function(TestFunctionId::f1d, x);
  for (Index i = 0; i < n; ++i) y(i) += 0.1 * rng.normal();
  return y;
}

// O(n) banded solve; the per-item rate should stay flat across sizes.
void BM_FdpFixedLambda(benchmark::State& state) {
  const VectorXd y = noisy_f1d(state.range(0));
  for (auto _ : state) {
    FdpFit fit = fit_fdp(y, LambdaPolicy::fixed(1e-9));
    benchmark::DoNotOptimize(fit.gamma_hat.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FdpFixedLambda)->RangeMultiplier(4)->Range(1 << 10, 1 << 20)->Unit(benchmark::kMillisecond)->Complexity();

void BM_FdpGcv(benchmark::State& state) {
  const VectorXd y = noisy_f1d(state.range(0));
  const std::vector<double> grid = {1e-10, 1e-9, 1e-8, 1e-7, 1e-6};
  for (auto _ : state) {
    FdpFit fit = fit_fdp(y, LambdaPolicy::gcv(grid));
    benchmark::DoNotOptimize(fit.gamma_hat.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FdpGcv)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond)->Complexity();

void BM_BandedTrace(benchmark::State& state) {
  const auto system = BandedSpdMatrix::second_difference_system(state.range(0), 1e-8);
  for (auto _ : state) benchmark::DoNotOptimize(hat_trace(system).value);
  state.counters["stochastic"] = hat_trace(system).stochastic ? 1 : 0;
}
BENCHMARK(BM_BandedTrace)->Arg(5000)->Arg(10000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace
