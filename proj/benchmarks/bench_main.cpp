#include <random>

#include <benchmark/benchmark.h>

#include "isingfin/exact.hpp"
#include "isingfin/inverse.hpp"
#include "isingfin/sampler.hpp"
#include "isingfin/tap.hpp"

using namespace isingfin;

namespace {

IsingModel random_model(std::size_t n, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sd);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix j = Matrix::Zero(nn, nn);
    Vector h(nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
        h(i) = u(rng);
        for (Eigen::Index k = i + 1; k < nn; ++k) j(i, k) = j(k, i) = g(rng);
    }
    return IsingModel(j, h);
}

}  // namespace

static void BM_LogPartition(benchmark::State& state) {
    const auto model = random_model(static_cast<std::size_t>(state.range(0)), 0.1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(log_partition(model));
}
BENCHMARK(BM_LogPartition)->DenseRange(8, 20, 4);

static void BM_ExactFit(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto targets = exact_moments(random_model(n, 1.0 / static_cast<double>(n), 2));
    for (auto _ : state) benchmark::DoNotOptimize(fit_maxent_exact(targets));
}
BENCHMARK(BM_ExactFit)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_GlauberSweep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    GlauberChain chain(random_model(n, 1.0 / std::sqrt(static_cast<double>(n)), 3), 3);
    for (auto _ : state) chain.sweep();
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GlauberSweep)->Arg(8)->Arg(100)->Arg(500);

static void BM_PlmFit(benchmark::State& state) {
    const auto model = random_model(15, 0.25, 4);
    const auto m = glauber_sample(model, SamplerConfig{500, 1, 4, static_cast<std::size_t>(state.range(0))});
    for (auto _ : state) benchmark::DoNotOptimize(plm_fit(m));
}
BENCHMARK(BM_PlmFit)->Arg(5000)->Arg(50000)->Unit(benchmark::kMillisecond);

static void BM_TapForward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = random_model(n, 0.5 / std::sqrt(static_cast<double>(n)), 5);
    for (auto _ : state) benchmark::DoNotOptimize(tap_fixed_point(model));
}
BENCHMARK(BM_TapForward)->Arg(10)->Arg(100)->Arg(400);

static void BM_TapInvert(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = glauber_sample(random_model(n, 0.05, 6), SamplerConfig{200, 1, 6, 20 * n});
    const auto mo = empirical_moments(m);
    for (auto _ : state) benchmark::DoNotOptimize(tap_invert(mo));
}
BENCHMARK(BM_TapInvert)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
