#include <christoffel/systems.hpp>

#include <benchmark/benchmark.h>

using namespace christoffel;

namespace {

void BM_ReachSampling(benchmark::State& state, ReachProblem (*make)(), unsigned workers) {
    const ReachSampler sampler(make(), 1, workers);
    std::uint64_t first = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.draw(0, first, 256));
        first += 256;
    }
    state.SetItemsProcessed(state.iterations() * 256);
}

ReachProblem duffing_default() { return duffing_problem(); }
ReachProblem quadrotor_default() { return quadrotor_problem(); }
ReachProblem traffic_default() { return traffic_problem(); }

BENCHMARK_CAPTURE(BM_ReachSampling, duffing, duffing_default, 1u)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ReachSampling, duffing_4_workers, duffing_default, 4u)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ReachSampling, quadrotor, quadrotor_default, 1u)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ReachSampling, traffic, traffic_default, 1u)->Unit(benchmark::kMillisecond);

}  // namespace
