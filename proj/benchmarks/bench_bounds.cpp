#include <christoffel/bounds.hpp>

#include <benchmark/benchmark.h>

using namespace christoffel;

namespace {

void BM_ClassicalSampleBound(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(classical_sample_bound(0.1, 1e-9, 231));
}
BENCHMARK(BM_ClassicalSampleBound);

void BM_KlInverseUpper(benchmark::State& state) {
    double q = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kl_inverse_upper(q, 0.02));
        q = q < 0.5 ? q + 1e-3 : 0.0;
    }
}
BENCHMARK(BM_KlInverseUpper);

void BM_EmpiricalRisk(benchmark::State& state) {
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = 1e-3 * static_cast<double>(i % 97);
    for (auto _ : state) benchmark::DoNotOptimize(empirical_stochastic_risk(values, 0.15));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalRisk)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
