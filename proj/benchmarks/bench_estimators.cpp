#include <benchmark/benchmark.h>

#include <reconstruct/reconstruct.hpp>

using namespace recon;

namespace {

// GPRR at A = X and universal kriging compute the same surface; this compares the two routes.
void BM_GprrTable1(benchmark::State& state) {
  const Dataset data = simulate(TestFunctionId::model_i, state.range(0), 2, 1.0, 3);
  const KernelSpec spec = KernelSpec::gaussian(2, 12.5);
  const KnotSet knots(data.x);
  for (auto _ : state) {
    FittedModel model = fit_gprr(data.x, data.y, knots, spec, RegressionBasis::linear, LambdaPolicy::gcv());
    benchmark::DoNotOptimize(model.weights.data());
  }
}
BENCHMARK(BM_GprrTable1)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_GprTable1(benchmark::State& state) {
  const Dataset data = simulate(TestFunctionId::model_i, state.range(0), 2, 1.0, 3);
  const KernelSpec spec = KernelSpec::gaussian(2, 12.5);
  for (auto _ : state) {
    FittedModel model = fit_gpr(data.x, data.y, spec, RegressionBasis::linear, LambdaPolicy::gcv());
    benchmark::DoNotOptimize(model.weights.data());
  }
}
BENCHMARK(BM_GprTable1)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_KrrTable1(benchmark::State& state) {
  const Dataset data = simulate(TestFunctionId::model_i, state.range(0), 2, 1.0, 3);
  const KernelSpec spec = KernelSpec::gaussian(2, 12.5);
  for (auto _ : state) {
    FittedModel model = fit_krr(data.x, data.y, spec, LambdaPolicy::gcv());
    benchmark::DoNotOptimize(model.weights.data());
  }
}
BENCHMARK(BM_KrrTable1)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

// Low-rank fits at the borehole scale, m knots out of n = 5000.
struct Borehole {
  Dataset data = simulate(TestFunctionId::borehole, 5000, 8, 0.0, 11);
  KernelSpec spec = KernelSpec::gaussian(8, 1.0);
};

const Borehole& borehole() {
  static const Borehole b;
  return b;
}

KnotSet first_rows(const MatrixXd& x, Index m) { return KnotSet(x.topRows(m)); }

void BM_GprrSubset(benchmark::State& state) {
  const Borehole& b = borehole();
  const KnotSet knots = first_rows(b.data.x, state.range(0));
  for (auto _ : state) {
    FittedModel model = fit_gprr(b.data.x, b.data.y, knots, b.spec, RegressionBasis::linear, LambdaPolicy::none());
    benchmark::DoNotOptimize(model.weights.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GprrSubset)->RangeMultiplier(2)->Range(20, 320)->Unit(benchmark::kMillisecond);

void BM_NystromSubset(benchmark::State& state) {
  const Borehole& b = borehole();
  const KnotSet knots = first_rows(b.data.x, state.range(0));
  for (auto _ : state) {
    FittedModel model = fit_nystrom(b.data.x, b.data.y, knots, b.spec, RegressionBasis::linear,
                                    LambdaPolicy::fixed(1e-6));
    benchmark::DoNotOptimize(model.weights.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NystromSubset)->RangeMultiplier(2)->Range(20, 320)->Unit(benchmark::kMillisecond)->Complexity();

void BM_SpgpSubset(benchmark::State& state) {
  const Borehole& b = borehole();
  const KnotSet knots = first_rows(b.data.x, state.range(0));
  const VarianceParams vp{1.0, 1e-2};
  for (auto _ : state) {
    FittedModel model = fit_spgp(b.data.x, b.data.y, knots, b.spec, vp);
    benchmark::DoNotOptimize(model.weights.data());
  }
}
BENCHMARK(BM_SpgpSubset)->RangeMultiplier(2)->Range(20, 320)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const Borehole& b = borehole();
  const FittedModel model =
      fit_gprr(b.data.x, b.data.y, first_rows(b.data.x, 80), b.spec, RegressionBasis::linear, LambdaPolicy::none());
  const MatrixXd xt = uniform_points(state.range(0), 8, 5);
  for (auto _ : state) benchmark::DoNotOptimize(predict(model, xt).data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Predict)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
