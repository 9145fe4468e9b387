#include <benchmark/benchmark.h>

#include <memory>

#include "scaccel/interpolant.hpp"
#include "scaccel/quasirandom.hpp"
#include "scaccel/sparse_grid.hpp"

using namespace scaccel;

namespace {

std::shared_ptr<const CollocationGrid> grid4(int level) {
    static std::shared_ptr<const CollocationGrid> cache[8];
    if (!cache[level]) {
        cache[level] = std::make_shared<const CollocationGrid>(
            build_grid(level, 4, AnisotropyWeights::isotropic(4)));
    }
    return cache[level];
}

} // namespace

// Per-prediction cost of the telescoped evaluation; the per-level counter
// tracks the M_L data vectors each evaluation touches once.
static void BM_PredictionWeights(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const auto grid = grid4(level);
    HaltonSequence seq(4);
    const auto y = seq.next();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse_basis_weights(*grid, level, y));
    }
    state.counters["support"] = static_cast<double>(grid->count_at(level));
}
BENCHMARK(BM_PredictionWeights)->DenseRange(2, 6);

static void BM_EvaluateVectorData(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const std::size_t m_h = 255;
    const auto grid = grid4(level);
    std::vector<std::vector<double>> data(grid->count_at(level),
                                          std::vector<double>(m_h, 1.0));
    const VectorValuedInterpolant interp(grid, level, std::move(data));
    HaltonSequence seq(4, 3);
    const auto y = seq.next();
    for (auto _ : state) {
        benchmark::DoNotOptimize(interp.evaluate(y));
    }
}
BENCHMARK(BM_EvaluateVectorData)->DenseRange(2, 5);

static void BM_QuadratureRule(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const auto grid = grid4(level);
    for (auto _ : state) {
        benchmark::DoNotOptimize(make_quadrature(*grid, level));
    }
}
BENCHMARK(BM_QuadratureRule)->DenseRange(2, 5);
