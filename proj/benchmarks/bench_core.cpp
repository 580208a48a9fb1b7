#include <benchmark/benchmark.h>

#include "mbsel/chisq.hpp"
#include "mbsel/gbt.hpp"
#include "mbsel/random.hpp"
#include "mbsel/rcit.hpp"

namespace {

using namespace mbsel;

Eigen::MatrixXd normals(Rng& rng, Eigen::Index n, Eigen::Index p) {
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = standard_normal(rng);
  return m;
}

void BM_RcitConditioningFeatures(benchmark::State& state) {
  Rng rng(1);
  const Eigen::Index n = 5000;
  const auto x = normals(rng, n, 1), y = normals(rng, n, 1), z = normals(rng, n, 8);
  RcitParams params;
  params.d_min = static_cast<int>(state.range(0));
  params.d_per_cond_var = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rcit(x, y, z, params).p_value);
}
BENCHMARK(BM_RcitConditioningFeatures)->Arg(40)->Arg(80)->Arg(160)->Arg(240)->Unit(benchmark::kMillisecond);

void BM_RcitSampleSize(benchmark::State& state) {
  Rng rng(2);
  const auto n = state.range(0);
  const auto x = normals(rng, n, 1), y = normals(rng, n, 1), z = normals(rng, n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(rcit(x, y, z).p_value);
}
BENCHMARK(BM_RcitSampleSize)->Arg(1000)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_EnsembleFit(benchmark::State& state) {
  Rng rng(3);
  const Eigen::Index n = 5000;
  const auto x = normals(rng, n, state.range(0));
  std::vector<double> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) * x(i, x.cols() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_ensemble(x, y, EnsembleParams::regression_defaults()).trees());
}
BENCHMARK(BM_EnsembleFit)->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ChisqConditional(benchmark::State& state) {
  Rng rng(4);
  const std::size_t n = 5000;
  std::vector<int> a(n), b(n), c1(n), c2(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<int>(rng() % 3);
    b[i] = static_cast<int>(rng() % 2);
    c1[i] = static_cast<int>(rng() % 4);
    c2[i] = static_cast<int>(rng() % 3);
  }
  const auto ca = Column::categorical("a", {"0", "1", "2"}, a);
  const auto cb = Column::categorical("b", {"0", "1"}, b);
  const auto z1 = Column::categorical("c1", {"0", "1", "2", "3"}, c1);
  const auto z2 = Column::categorical("c2", {"0", "1", "2"}, c2);
  const Column* cond[] = {&z1, &z2};
  for (auto _ : state) benchmark::DoNotOptimize(chisq_conditional(ca, cb, cond).p_value);
}
BENCHMARK(BM_ChisqConditional);

}  // namespace

BENCHMARK_MAIN();
