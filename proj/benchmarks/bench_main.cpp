#include <benchmark/benchmark.h>

#include "sflow/laplace.hpp"
#include "sflow/transfer.hpp"
#include "test_models.hpp"

using namespace sflow;

static void BM_Rpf(benchmark::State& st) {
  const SuspensionModel m = build_model(testing_models::chain_memory1());
  for (auto _ : st) benchmark::DoNotOptimize(rpf(m.f).pressure);
}
BENCHMARK(BM_Rpf);

static void BM_PathEnumeration(benchmark::State& st) {
  const SuspensionModel m = build_model(testing_models::three_symbol());
  const double t_max = static_cast<double>(st.range(0));
  for (auto _ : st) {
    long n = 0;
    enumerate_path_classes(m, t_max, [&](const PathClass&) { ++n; });
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_PathEnumeration)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_ZSeries(benchmark::State& st) {
  const SuspensionModel m = build_model(testing_models::chain_memory1());
  const Level lv = level_data(m, m.a_star + 0.02);
  const ComplexQuery q{cplx(lv.gamma + 0.5, 2.0), 0.7};
  for (auto _ : st) benchmark::DoNotOptimize(eval_Z_series(m, lv, q).value);
}
BENCHMARK(BM_ZSeries);
BENCHMARK_MAIN();
