#include <christoffel/estimators.hpp>
#include <christoffel/linalg.hpp>
#include <christoffel/random.hpp>

#include <benchmark/benchmark.h>

using namespace christoffel;

namespace {

Dataset cloud(Eigen::Index n, int dim, std::uint64_t seed = 1) {
    PointMatrix m(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto g = counter_engine(seed, 0, static_cast<std::uint64_t>(i));
        for (int j = 0; j < dim; ++j) m(i, j) = 2.0 * uniform01(g) - 1.0;
    }
    return Dataset(std::move(m));
}

void BM_BasisEvaluate(benchmark::State& state) {
    const MultiIndexBasis basis(2, static_cast<int>(state.range(0)));
    const std::vector<double> x{0.3, -0.7};
    Eigen::VectorXd z(basis.size());
    for (auto _ : state) {
        basis.evaluate_into(x, z);
        benchmark::DoNotOptimize(z.data());
    }
}
BENCHMARK(BM_BasisEvaluate)->Arg(4)->Arg(10)->Arg(20);

void BM_PolyFit(benchmark::State& state) {
    const Dataset data = cloud(state.range(0), 2);
    const MultiIndexBasis basis(2, 10);
    for (auto _ : state) benchmark::DoNotOptimize(PolyChristoffelEstimator::fit(data, basis, 1e-3));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PolyFit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PolyEvaluate(benchmark::State& state) {
    const auto est = PolyChristoffelEstimator::fit(cloud(5000, 2), MultiIndexBasis(2, 10), 1e-3);
    const Dataset queries = cloud(state.range(0), 2, 2);
    for (auto _ : state) benchmark::DoNotOptimize(est.evaluate(queries));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PolyEvaluate)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_KernelGram(benchmark::State& state) {
    const Dataset data = cloud(state.range(0), 2);
    const auto kernel = KernelSpec::squared_exponential(0.25);
    for (auto _ : state) benchmark::DoNotOptimize(kernel.gram(data));
}
BENCHMARK(BM_KernelGram)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_KernelFit(benchmark::State& state) {
    const Dataset data = cloud(state.range(0), 2);
    const auto kernel = KernelSpec::squared_exponential(0.25);
    for (auto _ : state) benchmark::DoNotOptimize(KernelChristoffelEstimator::fit(data, kernel, 0.1));
}
BENCHMARK(BM_KernelFit)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_InverseDiagonal(benchmark::State& state) {
    const Dataset data = cloud(state.range(0), 2);
    const auto est = KernelChristoffelEstimator::fit(data, KernelSpec::squared_exponential(0.25), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(linalg::inverse_diagonal(est.factor()));
}
BENCHMARK(BM_InverseDiagonal)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_NystromEvaluate(benchmark::State& state) {
    const auto est = NystromChristoffelEstimator::fit(cloud(10000, 2), KernelSpec::squared_exponential(0.25), 0.1,
                                                      state.range(0), {});
    const Dataset queries = cloud(1000, 2, 3);
    for (auto _ : state) benchmark::DoNotOptimize(est.evaluate(queries));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_NystromEvaluate)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LanczosTop(benchmark::State& state) {
    const Eigen::MatrixXd gram = KernelSpec::squared_exponential(0.25).gram(cloud(4000, 2));
    for (auto _ : state) benchmark::DoNotOptimize(linalg::top_eigenvalues(gram, state.range(0)));
}
BENCHMARK(BM_LanczosTop)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
