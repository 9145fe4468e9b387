#include <benchmark/benchmark.h>

#include "scaccel/fem.hpp"
#include "scaccel/solvers.hpp"

using namespace scaccel;

namespace {

AssembledSystem trig_system() {
    const auto problem = make_trig_diffusion_1d();
    const auto mesh = Mesh::interval(256, true, true);
    const std::vector<double> y{0.5, -0.5, 0.5, -0.5};
    return assemble(problem, mesh, y);
}

AssembledSystem kl_system() {
    const auto problem = make_kl_diffusion_2d(3, 1.0 / 64.0);
    const auto mesh = Mesh::unit_square(16);
    const std::vector<double> y{0.5, -0.5, 0.5};
    return assemble(problem, mesh, y);
}

} // namespace

static void BM_Assemble1d(benchmark::State& state) {
    const auto problem = make_trig_diffusion_1d();
    const auto mesh = Mesh::interval(static_cast<int>(state.range(0)), true, true);
    const std::vector<double> y{0.5, -0.5, 0.5, -0.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble(problem, mesh, y));
    }
}
BENCHMARK(BM_Assemble1d)->Arg(256)->Arg(1024);

static void BM_Assemble2d(benchmark::State& state) {
    const auto problem = make_kl_diffusion_2d(3, 1.0 / 64.0);
    const auto mesh = Mesh::unit_square(static_cast<int>(state.range(0)));
    const std::vector<double> y{0.5, -0.5, 0.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble(problem, mesh, y));
    }
}
BENCHMARK(BM_Assemble2d)->Arg(16)->Arg(32);

// Zero start vs a warm start at a given relative distance from the solution.
static void BM_CgStart(benchmark::State& state) {
    const auto sys = trig_system();
    const std::vector<double> zero(sys.rhs.size(), 0.0);
    auto [exact, rep0] = cg_solve(sys, zero, Preconditioner::identity(),
                                  {StopRule::Kind::absolute, 1e-12}, 100000);
    const double closeness = static_cast<double>(state.range(0)) / 100.0;
    std::vector<double> x0(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) x0[i] = closeness * exact[i];
    int iterations = 0;
    for (auto _ : state) {
        auto [x, rep] = cg_solve(sys, x0, Preconditioner::identity(),
                                 {StopRule::Kind::absolute, 1e-3}, 100000);
        iterations = rep.iterations;
        benchmark::DoNotOptimize(x);
    }
    state.counters["iterations"] = iterations;
}
BENCHMARK(BM_CgStart)->Arg(0)->Arg(90)->Arg(99);

static void BM_PcgDiagonal(benchmark::State& state) {
    const auto sys = kl_system();
    const auto pc = Preconditioner::diagonal_of(sys.matrix);
    const std::vector<double> x0(sys.rhs.size(), 0.0);
    for (auto _ : state) {
        auto [x, rep] = cg_solve(sys, x0, pc, {StopRule::Kind::absolute, 1e-14}, 100000);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_PcgDiagonal);

static void BM_PcgIc0(benchmark::State& state) {
    const auto sys = kl_system();
    const auto pc = ic0_factor(sys.matrix);
    const std::vector<double> x0(sys.rhs.size(), 0.0);
    for (auto _ : state) {
        auto [x, rep] = cg_solve(sys, x0, pc, {StopRule::Kind::absolute, 1e-14}, 100000);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_PcgIc0);

static void BM_Ic0Factor(benchmark::State& state) {
    const auto sys = kl_system();
    for (auto _ : state) {
        benchmark::DoNotOptimize(ic0_factor(sys.matrix));
    }
}
BENCHMARK(BM_Ic0Factor);
