#include <benchmark/benchmark.h>

#include "outsense/op_solver.hpp"
#include "outsense/pipeline.hpp"
#include "outsense/prox.hpp"
#include "outsense/synth.hpp"

namespace {

using namespace outsense;

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

void BM_Svt(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix x = random_matrix(n, 10 * n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(svt(x, 1.0));
}
BENCHMARK(BM_Svt)->Arg(10)->Arg(30)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_Lasso(benchmark::State& state) {
  const Index p = state.range(0);
  const Matrix a = random_matrix(p, 1000, 2) / std::sqrt(static_cast<double>(p));
  Vector c = Vector::Zero(1000);
  for (Index j = 990; j < 1000; ++j) c(j) = 1.0;
  const Vector y = a * c;
  const double mu = 0.01 * (a.transpose() * y).cwiseAbs().maxCoeff();
  for (auto _ : state) benchmark::DoNotOptimize(lasso_solve({.design = a, .observation = y, .reg = mu}));
}
BENCHMARK(BM_Lasso)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_OutlierPursuit(benchmark::State& state) {
  const Index n2 = state.range(0);
  const auto inst = generate_instance(30, n2, 5, n2 / 20, 3);
  for (auto _ : state) benchmark::DoNotOptimize(outlier_pursuit(inst.observed, 0.3));
}
BENCHMARK(BM_OutlierPursuit)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Acos(benchmark::State& state) {
  const auto inst = generate_instance(100, 1000, 5, 10, 4);
  AcosConfig cfg;
  cfg.m = 30;
  cfg.p = 300;
  cfg.lambda = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(acos(inst.observed, cfg));
}
BENCHMARK(BM_Acos)->Unit(benchmark::kMillisecond);

void BM_Sacos(benchmark::State& state) {
  const auto inst = generate_instance(100, 1000, 10, 300, 5);
  AcosConfig cfg;
  cfg.m = 30;
  cfg.lambda = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(sacos(inst.observed, cfg));
}
BENCHMARK(BM_Sacos)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
