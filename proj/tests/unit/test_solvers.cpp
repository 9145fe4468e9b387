#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "scaccel/estimates.hpp"
#include "scaccel/fem.hpp"
#include "scaccel/solvers.hpp"
#include "scaccel/sparse_grid.hpp"

using namespace scaccel;

namespace {

AssembledSystem make_system(CsrMatrix a, std::vector<double> b) {
    AssembledSystem sys;
    sys.matrix = std::move(a);
    sys.rhs = std::move(b);
    return sys;
}

CsrMatrix dense_to_csr(const std::vector<std::vector<double>>& a) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[i][j] != 0.0) t.push_back({i, j, a[i][j]});
        }
    }
    return CsrMatrix::from_triplets(a.size(), std::move(t));
}

// Gaussian elimination with partial pivoting; independent reference solve.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        }
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j];
        x[ii] = s / a[ii][ii];
    }
    return x;
}

} // namespace

TEST_CASE("cg on the identity converges in one iteration") {
    const auto a = dense_to_csr({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const auto sys = make_system(a, {2.0, -3.0, 0.5});
    const std::vector<double> x0(3, 0.0);
    auto [x, rep] = cg_solve(sys, x0, Preconditioner::identity(),
                             {StopRule::Kind::absolute, 1e-12}, 100);
    CHECK(rep.iterations == 1);
    CHECK(rep.converged);
    CHECK(x[1] == doctest::Approx(-3.0));
}

TEST_CASE("an exact initial guess costs zero iterations") {
    const auto a = dense_to_csr({{2, 1}, {1, 2}});
    const auto sys = make_system(a, {3.0, 3.0});
    const std::vector<double> exact{1.0, 1.0};
    auto [x, rep] = cg_solve(sys, exact, Preconditioner::identity(),
                             {StopRule::Kind::absolute, 1e-10}, 100);
    CHECK(rep.iterations == 0);
    CHECK(rep.converged);
}

TEST_CASE("2x2 system solves within two iterations") {
    const auto a = dense_to_csr({{2, 1}, {1, 2}});
    const auto sys = make_system(a, {3.0, 3.0});
    const std::vector<double> x0(2, 0.0);
    auto [x, rep] = cg_solve(sys, x0, Preconditioner::identity(),
                             {StopRule::Kind::absolute, 1e-12}, 100);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 2);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("A-norm error is nonincreasing over the iterations") {
    // 8x8 SPD matrix, error measured against an independent dense solve
    const std::size_t n = 8;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dense[i][j] = dist(rng);
    }
    std::vector<std::vector<double>> spd(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) spd[i][j] += dense[k][i] * dense[k][j];
        }
        spd[i][i] += 1.0;
    }
    std::vector<double> b(n);
    for (double& v : b) v = dist(rng);

    const auto a = dense_to_csr(spd);
    const auto sys = make_system(a, b);
    const auto exact = dense_solve(spd, b);

    const std::vector<double> x0(n, 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 8; ++k) {
        auto [x, rep] = cg_solve(sys, x0, Preconditioner::identity(),
                                 {StopRule::Kind::absolute, 1e-300}, k);
        std::vector<double> err(x);
        axpy(-1.0, exact, err);
        const double e = a_norm(sys.matrix, err);
        CHECK(e <= prev * (1.0 + 1e-12));
        prev = e;
    }
}

TEST_CASE("ic0 of a diagonal matrix is the exact square root") {
    const auto a = dense_to_csr({{4, 0}, {0, 9}});
    const auto pc = ic0_factor(a);
    const auto sys = make_system(a, {8.0, 27.0});
    const std::vector<double> x0(2, 0.0);
    auto [x, rep] = cg_solve(sys, x0, pc, {StopRule::Kind::absolute, 1e-12}, 50);
    CHECK(rep.iterations == 1);
    CHECK(x[0] == doctest::Approx(2.0));
    CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("ic0 of a tridiagonal SPD matrix is an exact factorization") {
    const auto problem = make_constant_coefficient_1d(1);
    const auto mesh = Mesh::interval(32, true, true);
    const std::vector<double> y{0.0};
    const auto sys = assemble(problem, mesh, y);
    const auto pc = ic0_factor(sys.matrix);
    const std::vector<double> x0(sys.rhs.size(), 0.0);
    auto [x, rep] = cg_solve(sys, x0, pc, {StopRule::Kind::relative, 1e-12}, 50);
    CHECK(rep.iterations == 1); // no fill exists, so IC0 = Cholesky
}

TEST_CASE("ic0 beats the diagonal preconditioner on the 2D Laplacian") {
    ProblemSpec p;
    p.spatial_dim = 2;
    p.coefficient.kind = CoefficientKind::constant;
    p.coefficient.constant_value = 1.0;
    p.domain = ParameterDomain::symmetric(1, 1.0);
    p.forcing = ForcingKind::constant;
    p.forcing_value = 1.0;
    const auto mesh = Mesh::unit_square(16); // 17x17 nodes
    const std::vector<double> y{0.0};
    const auto sys = assemble(p, mesh, y);
    const std::vector<double> x0(sys.rhs.size(), 0.0);

    auto [xd, rd] = cg_solve(sys, x0, Preconditioner::diagonal_of(sys.matrix),
                             {StopRule::Kind::absolute, 1e-10}, 5000);
    auto [xi, ri] = cg_solve(sys, x0, ic0_factor(sys.matrix),
                             {StopRule::Kind::absolute, 1e-10}, 5000);
    CHECK(rd.converged);
    CHECK(ri.converged);
    CHECK(ri.iterations < rd.iterations);
}

TEST_CASE("interpolated preconditioner: delta property and partition of unity") {
    const auto grid = build_grid(1, 2, AnisotropyWeights::isotropic(2));
    const std::size_t m = 3;

    // distinct diagonal bases so the delta property is observable
    std::vector<std::shared_ptr<const Preconditioner>> base;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < m; ++i) {
            t.push_back({i, i, 1.0 + static_cast<double>(j + i)});
        }
        base.push_back(std::make_shared<Preconditioner>(
            Preconditioner::diagonal_of(CsrMatrix::from_triplets(m, std::move(t)))));
    }

    const std::vector<double> r{1.0, 2.0, 3.0};
    std::vector<double> z(m), want(m);
    for (const auto& p : grid.points()) {
        const auto pc = interpolate_preconditioner(base, grid, 1, p.coords);
        pc.apply(r, z);
        base[p.id]->apply(r, want);
        for (std::size_t i = 0; i < m; ++i) CHECK(z[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }

    // identical bases reproduce that base at any point (weights sum to 1)
    std::vector<std::shared_ptr<const Preconditioner>> same(grid.size(), base[0]);
    const std::vector<double> y{0.31, -0.62};
    const auto pc = interpolate_preconditioner(same, grid, 1, y);
    pc.apply(r, z);
    base[0]->apply(r, want);
    for (std::size_t i = 0; i < m; ++i) CHECK(z[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("indefinite interpolated preconditioner falls back to diagonal") {
    const auto a = dense_to_csr({{2, 1}, {1, 2}});
    const auto sys = make_system(a, {3.0, 3.0});
    auto id = std::make_shared<Preconditioner>(Preconditioner::identity());
    const auto bad = Preconditioner::interpolated({{-1.0, id}});
    const std::vector<double> x0(2, 0.0);
    auto [x, rep] = cg_solve(sys, x0, bad, {StopRule::Kind::absolute, 1e-10}, 100);
    CHECK(rep.converged);
    CHECK(rep.preconditioner_fallback);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("nonlinear solver on a zero right-hand side") {
    ProblemSpec p = make_nonlinear_1d(Nonlinearity::power_five);
    p.forcing = ForcingKind::constant;
    p.forcing_value = 0.0;
    p.right = {BoundarySpec::Kind::dirichlet, 0.0}; // u = 0 solves exactly
    const auto mesh = Mesh::interval(16, true, true);
    const std::vector<double> y{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> x0(mesh.free_dof_count(), 0.0);
    auto [c, rep] = nonlinear_solve(p, mesh, y, x0, 1e-10);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 1);
    CHECK(norm2(c) < 1e-12);
}

TEST_CASE("nonlinear solver: exact warm start costs zero outer iterations") {
    const auto problem = make_nonlinear_1d(Nonlinearity::u_times_du);
    const auto mesh = Mesh::interval(24, true, false);
    const std::vector<double> y{0.4, -0.2, 0.8, -0.6};
    const std::vector<double> x0(mesh.free_dof_count(), 0.0);
    auto [c, rep] = nonlinear_solve(problem, mesh, y, x0, 1e-10);
    REQUIRE(rep.converged);
    CHECK(rep.iterations > 0);
    CHECK(rep.picard_iterations > 0);
    CHECK(rep.newton_iterations > 0); // the composite path actually switched

    auto [c2, rep2] = nonlinear_solve(problem, mesh, y, c, 1e-10);
    CHECK(rep2.converged);
    CHECK(rep2.iterations == 0);
}

TEST_CASE("measured zero-start iterations respect the convergence bound") {
    const auto problem = make_trig_diffusion_1d();
    const auto mesh = Mesh::interval(64, true, true);
    const std::vector<double> y{1.0, -1.0, 1.0, -1.0};
    const auto sys = assemble(problem, mesh, y);
    const std::vector<double> x0(sys.rhs.size(), 0.0);
    const double tau = 1e-6;
    auto [c, rep] = cg_solve(sys, x0, Preconditioner::identity(),
                             {StopRule::Kind::absolute, tau}, 10000);
    REQUIRE(rep.converged);
    const double kappa = estimate_condition(sys.matrix, 1e-5);
    const double bound = cg_iteration_bound(a_norm(sys.matrix, c), tau, kappa);
    CHECK(static_cast<double>(rep.iterations) <= bound);
}

TEST_CASE("preconditioner applications are symmetric") {
    const auto problem = make_trig_diffusion_1d();
    const auto mesh = Mesh::interval(32, true, true);
    const std::vector<double> y{0.2, 0.4, -0.6, 0.8};
    const auto sys = assemble(problem, mesh, y);
    const std::size_t n = sys.matrix.rows();

    auto ic = std::make_shared<Preconditioner>(ic0_factor(sys.matrix));
    auto dg = std::make_shared<Preconditioner>(Preconditioner::diagonal_of(sys.matrix));
    const auto mixed = Preconditioner::interpolated({{0.7, ic}, {0.5, dg}, {-0.2, ic}});
    const Preconditioner id = Preconditioner::identity();
    const std::vector<const Preconditioner*> kinds{&id, dg.get(), ic.get(), &mixed};

    std::mt19937 rng(11);
    std::normal_distribution<double> dist;
    std::vector<double> r(n), s(n), pr(n), ps(n);
    for (const Preconditioner* pc : kinds) {
        for (int t = 0; t < 20; ++t) {
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = dist(rng);
                s[i] = dist(rng);
            }
            pc->apply(r, pr);
            pc->apply(s, ps);
            const double gap = std::abs(dot(pr, s) - dot(r, ps));
            CHECK(gap <= 1e-12 * norm2(r) * norm2(s));
        }
    }
}

TEST_CASE("ic0 rejects an indefinite matrix after the shift retries") {
    // eigenvalues 3 and -1: no diagonal shift in the retry range fixes it
    const auto bad = dense_to_csr({{1, 2}, {2, 1}});
    CHECK_THROWS_AS(ic0_factor(bad), std::runtime_error);
}

TEST_CASE("solver input validation") {
    const auto a = dense_to_csr({{2, 1}, {1, 2}});
    auto sys = make_system(a, {3.0, 3.0});
    const std::vector<double> short_x0(1, 0.0);
    CHECK_THROWS_AS(cg_solve(sys, short_x0, Preconditioner::identity(),
                             {StopRule::Kind::absolute, 1e-10}, 10),
                    std::invalid_argument);
    sys.rhs[0] = std::numeric_limits<double>::quiet_NaN();
    const std::vector<double> x0(2, 0.0);
    CHECK_THROWS_AS(cg_solve(sys, x0, Preconditioner::identity(),
                             {StopRule::Kind::absolute, 1e-10}, 10),
                    std::runtime_error);
}
