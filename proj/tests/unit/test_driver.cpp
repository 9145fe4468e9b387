#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "scaccel/driver.hpp"
#include "scaccel/estimates.hpp"
#include "scaccel/fem.hpp"

using namespace scaccel;

namespace {

RunConfig small_trig_config() {
    RunConfig cfg;
    cfg.problem = make_trig_diffusion_1d();
    cfg.n_dims = 4;
    cfg.mesh_cells = 64;
    cfg.max_level = 2;
    cfg.alpha = AnisotropyWeights::isotropic(4);
    cfg.solver.stop = {StopRule::Kind::absolute, 1e-6};
    cfg.solver.preconditioner = PcPolicy::identity;
    cfg.cost_per_matvec = 5;
    cfg.workers = 2;
    return cfg;
}

} // namespace

TEST_CASE("nearest-neighbor prediction rules") {
    const auto grid = build_grid(1, 2, AnisotropyWeights::isotropic(2));
    // points: id0 = (0,0); level-1 points on the axes
    std::vector<std::vector<double>> sols(grid.size());
    for (const auto& p : grid.points()) sols[p.id] = {static_cast<double>(p.id)};

    const std::vector<double> anywhere{0.9, -0.3};
    CHECK(predict_nearest(grid, sols, 1, 1, anywhere)[0] == 0.0); // single prior point

    // coincident point wins
    CHECK(predict_nearest(grid, sols, grid.size(), 1, grid.point(3).coords)[0] == 3.0);

    // equidistant tie between ids 0 and 1 resolves to the lower id
    const auto& p0 = grid.point(0).coords;
    const auto& p1 = grid.point(1).coords;
    std::vector<double> mid(2);
    for (std::size_t n = 0; n < 2; ++n) mid[n] = 0.5 * (p0[n] + p1[n]);
    CHECK(predict_nearest(grid, sols, 2, 1, mid)[0] == 0.0);

    // no prior points: zero vector of the requested length
    const auto zero = predict_nearest(grid, sols, 0, 3, anywhere);
    CHECK(zero == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("interpolant prediction: constants and the delta property") {
    auto grid = std::make_shared<const CollocationGrid>(
        build_grid(2, 2, AnisotropyWeights::isotropic(2)));
    std::vector<std::vector<double>> constant(grid->count_at(1), {2.0, -1.0});
    const VectorValuedInterpolant prior(grid, 1, constant);

    const std::vector<double> y{0.77, 0.13};
    const auto pred = predict_initial(prior, y);
    CHECK(pred[0] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(pred[1] == doctest::Approx(-1.0).epsilon(1e-13));

    std::vector<std::vector<double>> varied(grid->count_at(1));
    for (std::size_t id = 0; id < varied.size(); ++id) {
        varied[id] = {static_cast<double>(id) + 0.5};
    }
    const VectorValuedInterpolant prior2(grid, 1, varied);
    for (std::size_t id = 0; id < grid->count_at(1); ++id) {
        CHECK(predict_initial(prior2, grid->point(id).coords)[0] ==
              doctest::Approx(varied[id][0]).epsilon(1e-12));
    }
}

TEST_CASE("cost model reproduces the reference savings") {
    const auto grid = build_grid(3, 4, AnisotropyWeights::isotropic(4));
    const long long c_int = interpolation_cost(255, grid, 3);
    CHECK(c_int == 255LL * (8 * 1 + 32 * 17 + 96 * 81));

    const double savings = cost_savings(28259, 21123, 255, 5, c_int);
    CHECK(100.0 * savings == doctest::Approx(19.4).epsilon(0.005)); // 19.36 rounds to 19.4
    CHECK(iteration_savings(28259, 21123) == doctest::Approx(0.2525).epsilon(1e-3));
}

TEST_CASE("degenerate single-level run") {
    RunConfig cfg = small_trig_config();
    cfg.max_level = 0;
    const auto report = run_experiment(cfg, {Mode::zero, Mode::accelerated});
    const auto* zero = find_mode(report, Mode::zero);
    const auto* acc = find_mode(report, Mode::accelerated);
    REQUIRE(zero);
    REQUIRE(acc);
    CHECK(zero->total_iterations == zero->levels[0].iterations[0]);
    CHECK(acc->interpolation_cost == 0);
    CHECK(report.cost_savings == 0.0);
}

TEST_CASE("mode invariance and cost bookkeeping on a small replica") {
    RunConfig cfg = small_trig_config();
    const auto report = run_experiment(cfg, {Mode::zero, Mode::accelerated});
    const auto* zero = find_mode(report, Mode::zero);
    const auto* acc = find_mode(report, Mode::accelerated);
    REQUIRE(zero);
    REQUIRE(acc);
    CHECK(!zero->failed);
    CHECK(!acc->failed);

    // exact integer bookkeeping: C_acc - C_iter*K_acc = C_int
    const long long c_iter = cfg.cost_per_matvec * static_cast<long long>(report.m_h);
    CHECK(acc->total_cost - c_iter * acc->total_iterations == acc->interpolation_cost);
    CHECK(zero->total_cost == c_iter * zero->total_iterations);

    // K totals match the per-level lists
    long long k = 0;
    for (const auto& lv : zero->levels) {
        for (int it : lv.iterations) k += it;
    }
    CHECK(k == zero->total_iterations);

    // final solutions agree in the A-norm within 10*tau at every point
    const Mesh mesh = Mesh::interval(cfg.mesh_cells, true, true);
    const auto grid = build_grid(cfg.max_level, 4, cfg.alpha);
    for (std::size_t id = 0; id < grid.size(); ++id) {
        const auto sys = assemble(cfg.problem, mesh, grid.point(id).coords);
        std::vector<double> diff = zero->solutions[id];
        axpy(-1.0, acc->solutions[id], diff);
        CHECK(a_norm(sys.matrix, diff) <= 10.0 * cfg.solver.stop.tol);
    }
}

TEST_CASE("constant problem: exact predictions, flat error curve") {
    RunConfig cfg;
    cfg.problem = make_constant_coefficient_1d(2);
    cfg.n_dims = 2;
    cfg.mesh_cells = 32;
    cfg.max_level = 2;
    cfg.reference_level = 3;
    cfg.alpha = AnisotropyWeights::isotropic(2);
    cfg.solver.stop = {StopRule::Kind::absolute, 1e-10};
    cfg.workers = 1;

    const auto report = run_experiment(cfg, {Mode::zero, Mode::accelerated});
    const auto* acc = find_mode(report, Mode::accelerated);
    REQUIRE(acc);
    // warm starts are exact from level 1 on: zero further iterations
    for (std::size_t w = 1; w < acc->levels.size(); ++w) {
        CHECK(acc->levels[w].max_iterations == 0);
    }
    for (const auto& [level, err] : acc->error_curve) {
        CHECK(err < 1e-12);
    }
}

TEST_CASE("error curve against the run itself vanishes at the top level") {
    RunConfig cfg;
    cfg.problem = make_constant_coefficient_1d(2);
    cfg.n_dims = 2;
    cfg.mesh_cells = 16;
    cfg.max_level = 2;
    cfg.alpha = AnisotropyWeights::isotropic(2);
    cfg.solver.stop = {StopRule::Kind::absolute, 1e-12};
    cfg.workers = 1;

    const Mesh mesh = Mesh::interval(cfg.mesh_cells, true, true);
    auto grid = std::make_shared<const CollocationGrid>(build_grid(2, 2, cfg.alpha));
    const auto result = run_mode(cfg, mesh, grid, Mode::zero);

    std::vector<std::vector<double>> data(result.solutions.begin(),
                                          result.solutions.begin() +
                                              static_cast<std::ptrdiff_t>(grid->count_at(2)));
    const VectorValuedInterpolant self_ref(grid, 2, std::move(data));
    const auto curve = error_curve(mesh, *grid, 2, result.solutions, self_ref);
    CHECK(curve.back().second == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("warm starts dominate zero starts when the prediction is closer") {
    // replica scale: h = 1/256, W = 3, absolute tolerance 1e-3
    RunConfig cfg = small_trig_config();
    cfg.mesh_cells = 256;
    cfg.max_level = 3;
    cfg.solver.stop = {StopRule::Kind::absolute, 1e-3};
    const auto report = run_experiment(cfg, {Mode::zero, Mode::accelerated});
    const auto* zero = find_mode(report, Mode::zero);
    const auto* acc = find_mode(report, Mode::accelerated);
    REQUIRE(zero);
    REQUIRE(acc);

    // Pointwise dominance is quantized away by residual-norm stopping (CG
    // counts depend on the spectral mix of the initial error, not just its
    // size); what the scheme guarantees here is a strong aggregate effect.
    std::size_t eligible = 0;
    std::size_t dominated = 0;
    long long iter_sum_acc = 0;
    long long iter_sum_zero = 0;
    for (std::size_t id = 0; id < acc->solves.size(); ++id) {
        const auto& a = acc->solves[id];
        const auto& z = zero->solves[id];
        if (a.level < 2) continue;
        if (a.initial_error_a_norm > a.solution_a_norm) continue; // prediction not closer
        ++eligible;
        if (a.iterations <= z.iterations) ++dominated;
        iter_sum_acc += a.iterations;
        iter_sum_zero += z.iterations;
    }
    REQUIRE(eligible > 50);
    CHECK(static_cast<double>(dominated) >= (2.0 / 3.0) * static_cast<double>(eligible));
    CHECK(iter_sum_acc < iter_sum_zero); // aggregate dominance over levels >= 2

    CHECK(acc->total_iterations < zero->total_iterations); // W = 3 savings direction
}

TEST_CASE("measured interpolation cost sits under the fitted bound") {
    // run the 2D expansion problem, fit the decay constants from its error
    // curve, then evaluate the work bounds at the level-W error budget
    RunConfig cfg;
    cfg.problem = make_kl_diffusion_2d(3, 1.0 / 64.0);
    cfg.n_dims = 3;
    cfg.mesh_cells = 16;
    cfg.max_level = 3;
    cfg.reference_level = 4;
    cfg.alpha = AnisotropyWeights::isotropic(3);
    cfg.solver.stop = {StopRule::Kind::absolute, 1e-14};
    cfg.solver.preconditioner = PcPolicy::diagonal;
    cfg.workers = 2;
    const auto report = run_experiment(cfg, {Mode::accelerated});
    const auto* acc = find_mode(report, Mode::accelerated);
    REQUIRE(acc);
    REQUIRE(acc->error_curve.size() == 4);

    std::vector<int> levels;
    std::vector<double> errors;
    for (const auto& [w, e] : acc->error_curve) {
        if (w >= 1) { // level 0 is far off the asymptotic decay
            levels.push_back(w);
            errors.push_back(e);
        }
    }
    const auto fit = fit_sc_decay(levels, errors, 3);
    CHECK(fit.rate > 0.0);

    EstimateParams p;
    p.n_dims = 3;
    p.c_sc = fit.constant;
    p.decay_rate = fit.rate;
    p.condition_constant = 2.0;
    const double eps =
        3.0 * fit.constant * std::exp(-fit.rate * 3.0 * std::pow(2.0, 3.0 / 3.0));
    const auto bounds = total_bounds(p, eps, report.m_h);
    CHECK(bounds.level >= 2); // the budget reproduces roughly the run's level
    CHECK(bounds.level <= 4);
    CHECK(static_cast<double>(acc->interpolation_cost) <= 2.0 * bounds.interpolation_cost);
    for (int w = 0; w <= 3; ++w) {
        CHECK(static_cast<double>(report.grid.count[static_cast<std::size_t>(w)]) <=
              point_count_bound(w, 3));
    }
}

TEST_CASE("experiment validation errors") {
    RunConfig cfg = small_trig_config();
    cfg.n_dims = 3; // problem owns 4 parameter dimensions
    CHECK_THROWS_AS(run_experiment(cfg, {Mode::zero}), std::invalid_argument);

    cfg = small_trig_config();
    CHECK_THROWS_AS(run_experiment(cfg, {}), std::invalid_argument);
}
