#include <benchmark/benchmark.h>

#include "scaccel/sparse_grid.hpp"

using namespace scaccel;

static void BM_BuildGrid4d(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const auto alpha = AnisotropyWeights::isotropic(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_grid(level, 4, alpha));
    }
    state.counters["points"] = static_cast<double>(
        build_grid(level, 4, alpha).size());
}
BENCHMARK(BM_BuildGrid4d)->DenseRange(3, 7);

static void BM_BuildGrid11dAnisotropic(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const AnisotropyWeights alpha({0.85, 0.8, 0.8, 1.0, 1.0, 1.6, 1.6, 2.6, 2.6, 3.7, 3.7});
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_grid(level, 11, alpha));
    }
}
BENCHMARK(BM_BuildGrid11dAnisotropic)->DenseRange(2, 4);

static void BM_AdmissibleIndices(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const auto alpha = AnisotropyWeights::isotropic(6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(admissible_indices(level, 6, alpha));
    }
}
BENCHMARK(BM_AdmissibleIndices)->DenseRange(3, 6);
