// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier experiment runs are shared across related criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "scaccel/driver.hpp"
#include "scaccel/estimates.hpp"
#include "scaccel/fem.hpp"
#include "scaccel/interpolant.hpp"
#include "scaccel/quasirandom.hpp"
#include "scaccel/sparse_grid.hpp"

using namespace scaccel;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

struct Criterion {
    int id;
    std::string name;
    std::function<void(Outcome&)> body;
};

void expect(Outcome& out, bool ok, const std::string& what) {
    if (!ok) {
        out.pass = false;
        out.detail << "[failed: " << what << "] ";
    }
}

long long cumulative_iterations(const ModeResult& mode, int through_level) {
    long long k = 0;
    for (const auto& lv : mode.levels) {
        if (lv.level <= through_level) {
            for (int it : lv.iterations) k += it;
        }
    }
    return k;
}

// ---- shared experiment runs -------------------------------------------------

const ExperimentReport& trig_replica() {
    static const ExperimentReport report = [] {
        RunConfig cfg;
        cfg.problem = make_trig_diffusion_1d();
        cfg.n_dims = 4;
        cfg.mesh_cells = 256; // h = 1/256, 255 free dofs
        cfg.max_level = 4;
        cfg.alpha = AnisotropyWeights::isotropic(4);
        cfg.solver.stop = {StopRule::Kind::absolute, 1e-3};
        cfg.solver.preconditioner = PcPolicy::identity;
        cfg.cost_per_matvec = 5;
        cfg.measure_condition = true;
        cfg.workers = 2;
        return run_experiment(cfg, {Mode::zero, Mode::accelerated});
    }();
    return report;
}

const ExperimentReport& kl_replica() {
    static const ExperimentReport report = [] {
        RunConfig cfg;
        cfg.problem = make_kl_diffusion_2d(3, 1.0 / 64.0);
        cfg.n_dims = 3;
        cfg.mesh_cells = 16; // 17x17 nodes, 225 free dofs
        cfg.max_level = 3;
        cfg.reference_level = 4;
        cfg.alpha = AnisotropyWeights::isotropic(3);
        cfg.solver.stop = {StopRule::Kind::absolute, 1e-14};
        cfg.solver.preconditioner = PcPolicy::diagonal;
        cfg.cost_per_matvec = 9;
        cfg.measure_condition = true;
        cfg.workers = 2;
        return run_experiment(cfg, {Mode::zero, Mode::accelerated, Mode::nearest_neighbor});
    }();
    return report;
}

ExperimentReport kl_pc_run(PcPolicy pc) {
    RunConfig cfg;
    cfg.problem = make_kl_diffusion_2d(3, 1.0 / 64.0);
    cfg.n_dims = 3;
    cfg.mesh_cells = 16;
    cfg.max_level = 3;
    cfg.alpha = AnisotropyWeights::isotropic(3);
    cfg.solver.stop = {StopRule::Kind::absolute, 1e-14};
    cfg.solver.preconditioner = pc;
    cfg.solver.pc_level = 2;
    cfg.cost_per_matvec = 9;
    cfg.workers = 2;
    return run_experiment(cfg, {Mode::zero});
}

ExperimentReport nonlinear_run(Nonlinearity f) {
    RunConfig cfg;
    cfg.problem = make_nonlinear_1d(f);
    cfg.n_dims = 4;
    cfg.mesh_cells = 100; // h = 1/100
    cfg.max_level = 4;
    cfg.alpha = AnisotropyWeights::isotropic(4);
    cfg.solver.nonlinear_rel_tol = 1e-8;
    cfg.workers = 1; // timing comparison: keep per-point work serial and steady
    return run_experiment(cfg, {Mode::zero, Mode::accelerated});
}

// ---- criteria ---------------------------------------------------------------

void criterion_grid_counts(Outcome& out) {
    const auto grid = build_grid(7, 4, AnisotropyWeights::isotropic(4));
    const std::size_t expect_counts[5] = {137, 401, 1105, 2929, 7537};
    for (int w = 3; w <= 7; ++w) {
        const std::size_t got = grid.count_at(w);
        expect(out, got == expect_counts[w - 3],
               "M_" + std::to_string(w) + " = " + std::to_string(got));
    }
    out.detail << "M_3..M_7 = ";
    for (int w = 3; w <= 7; ++w) out.detail << grid.count_at(w) << (w < 7 ? "," : "");
}

void criterion_cost_arithmetic(Outcome& out) {
    const auto grid = build_grid(3, 4, AnisotropyWeights::isotropic(4));
    const long long c_int = interpolation_cost(255, grid, 3);
    const double savings_pct = 100.0 * cost_savings(28259, 21123, 255, 5, c_int);
    expect(out, std::abs(savings_pct - 19.4) <= 0.1, "savings off the expected value");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "C_int=%lld savings=%.4f%% (expected 19.4%%)", c_int,
                  savings_pct);
    out.detail << buf;
}

void criterion_trig_band(Outcome& out) {
    const auto& rep = trig_replica();
    const auto* zero = find_mode(rep, Mode::zero);
    const auto* acc = find_mode(rep, Mode::accelerated);
    expect(out, zero && !zero->failed && acc && !acc->failed, "replica run failed");
    const long long kz = cumulative_iterations(*zero, 3);
    const long long ka = cumulative_iterations(*acc, 3);
    const auto grid = build_grid(3, 4, AnisotropyWeights::isotropic(4));
    const long long c_int = interpolation_cost(rep.m_h, grid, 3);
    const double iter_sav = iteration_savings(kz, ka);
    const double cost_sav = cost_savings(kz, ka, rep.m_h, rep.cost_per_matvec, c_int);
    expect(out, ka < kz, "K_acc not strictly below K_zero");
    expect(out, iter_sav >= 0.10 && iter_sav <= 0.30, "iteration savings outside [10%,30%]");
    expect(out, cost_sav >= 0.10 && cost_sav <= 0.30, "cost savings outside [10%,30%]");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "W=3: K_zero=%lld K_acc=%lld iter=%.1f%% cost=%.1f%%", kz,
                  ka, 100.0 * iter_sav, 100.0 * cost_sav);
    out.detail << buf;
}

void criterion_level_shape(Outcome& out) {
    const auto& rep = trig_replica();
    const auto* zero = find_mode(rep, Mode::zero);
    const auto* acc = find_mode(rep, Mode::accelerated);
    const auto mean = [](const ModeResult& m, int w) {
        return m.levels[static_cast<std::size_t>(w)].mean_iterations;
    };
    expect(out, mean(*acc, 2) > mean(*acc, 3), "accelerated mean not decreasing 2->3");
    expect(out, mean(*acc, 3) > mean(*acc, 4), "accelerated mean not decreasing 3->4");
    double zmin = mean(*zero, 2), zmax = zmin;
    for (int w = 2; w <= 4; ++w) {
        zmin = std::min(zmin, mean(*zero, w));
        zmax = std::max(zmax, mean(*zero, w));
    }
    expect(out, zmax <= 1.15 * zmin, "zero-mode means vary by more than 15%");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "acc means %.1f>%.1f>%.1f; zero spread %.1f%%",
                  mean(*acc, 2), mean(*acc, 3), mean(*acc, 4), 100.0 * (zmax / zmin - 1.0));
    out.detail << buf;
}

void criterion_solution_invariance(Outcome& out) {
    const auto& rep = trig_replica();
    const auto* zero = find_mode(rep, Mode::zero);
    const auto* acc = find_mode(rep, Mode::accelerated);
    const ProblemSpec problem = make_trig_diffusion_1d();
    const Mesh mesh = Mesh::interval(256, true, true);
    const auto grid = build_grid(4, 4, AnisotropyWeights::isotropic(4));
    const double tau = 1e-3;
    double worst = 0.0;
    for (std::size_t id = 0; id < grid.size(); ++id) {
        const auto sys = assemble(problem, mesh, grid.point(id).coords);
        std::vector<double> diff = zero->solutions[id];
        axpy(-1.0, acc->solutions[id], diff);
        worst = std::max(worst, a_norm(sys.matrix, diff));
    }
    expect(out, worst <= 10.0 * tau, "modes disagree beyond 10*tau in the A-norm");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max A-norm gap %.3e (allowance %.1e)", worst, 10.0 * tau);
    out.detail << buf;
}

void criterion_delta_and_polynomials(Outcome& out) {
    double worst_delta = 0.0;
    for (int dims = 1; dims <= 3; ++dims) {
        const int level = 4;
        const auto grid = build_grid(level, dims, AnisotropyWeights::isotropic(dims));
        for (const auto& p : grid.points()) {
            const auto weights = sparse_basis_weights(grid, level, p.coords);
            for (const auto& [id, w] : weights) {
                worst_delta = std::max(worst_delta, std::abs(w - (id == p.id ? 1.0 : 0.0)));
            }
        }
    }
    expect(out, worst_delta < 1e-10, "delta property violated");

    double worst_poly = 0.0;
    for (int dims = 1; dims <= 2; ++dims) {
        const int level = 4;
        auto grid = std::make_shared<const CollocationGrid>(
            build_grid(level, dims, AnisotropyWeights::isotropic(dims)));
        const auto iso = AnisotropyWeights::isotropic(dims);
        std::vector<std::vector<int>> powers;
        for (int p0 = 0; p0 <= 4; ++p0) {
            if (dims == 1) {
                powers.push_back({p0});
            } else {
                for (int p1 = 0; p0 + p1 <= 4; ++p1) powers.push_back({p0, p1});
            }
        }
        for (const auto& pw : powers) {
            MultiIndex needed;
            for (int p : pw) needed.push_back(min_level_for_points(p + 1));
            if (smolyak_level(needed, iso) > level) continue;
            std::vector<std::vector<double>> data(grid->size());
            for (const auto& pt : grid->points()) {
                double v = 1.0;
                for (int n = 0; n < dims; ++n) {
                    v *= std::pow(pt.coords[static_cast<std::size_t>(n)], pw[static_cast<std::size_t>(n)]);
                }
                data[pt.id] = {v};
            }
            const VectorValuedInterpolant interp(grid, level, std::move(data));
            HaltonSequence seq(dims, 5);
            for (int s = 0; s < 25; ++s) {
                const auto y = seq.next();
                double want = 1.0;
                for (int n = 0; n < dims; ++n) {
                    want *= std::pow(y[static_cast<std::size_t>(n)], pw[static_cast<std::size_t>(n)]);
                }
                worst_poly = std::max(worst_poly, std::abs(interp.evaluate(y)[0] - want));
            }
        }
    }
    expect(out, worst_poly < 1e-10, "admissible monomial not reproduced");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max|Psi-delta|=%.2e, max poly err=%.2e", worst_delta,
                  worst_poly);
    out.detail << buf;
}

void criterion_quadrature_moments(Outcome& out) {
    double worst = 0.0;
    for (int dims = 1; dims <= 3; ++dims) {
        const auto grid = build_grid(3, dims, AnisotropyWeights::isotropic(dims));
        const auto rule = make_quadrature(grid, 3);
        worst = std::max(worst, std::abs(rule.weight_sum - 1.0));
        for (int n = 0; n < dims; ++n) {
            double m2 = 0.0, m4 = 0.0;
            for (const auto& [id, w] : rule.weights) {
                const double y = grid.point(id).coords[static_cast<std::size_t>(n)];
                m2 += w * y * y;
                m4 += w * y * y * y * y;
            }
            worst = std::max(worst, std::abs(m2 - 1.0 / 3.0));
            worst = std::max(worst, std::abs(m4 - 1.0 / 5.0));
        }
    }
    expect(out, worst <= 1e-12, "moment error above 1e-12");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max moment error %.2e", worst);
    out.detail << buf;
}

void criterion_lebesgue(Outcome& out) {
    double worst_margin = 0.0;
    for (int dims = 1; dims <= 3; ++dims) {
        const std::size_t samples = dims == 1 ? 20000 : (dims == 2 ? 6000 : 2500);
        for (int level = 0; level <= 4; ++level) {
            const auto grid = build_grid(level, dims, AnisotropyWeights::isotropic(dims));
            const double est = lebesgue_estimate(grid, level, samples);
            const double bound = lebesgue_bound(level, dims);
            expect(out, est <= bound,
                   "estimate exceeds bound at N=" + std::to_string(dims) +
                       " L=" + std::to_string(level));
            worst_margin = std::max(worst_margin, est / bound);
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst estimate/bound = %.3f", worst_margin);
    out.detail << buf;
}

void criterion_cg_bound(Outcome& out) {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst = 0.0;
    for (const ExperimentReport* rep : {&trig_replica(), &kl_replica()}) {
        for (const auto& mode : rep->modes) {
            for (const auto& s : mode.solves) {
                if (s.guess != GuessSource::zero || s.condition <= 1.0) continue;
                ++checked;
                const double bound =
                    cg_iteration_bound(s.solution_a_norm, rep->solver_tolerance, s.condition);
                worst = std::max(worst, bound > 0.0 ? s.iterations / bound : 2.0);
                if (static_cast<double>(s.iterations) > bound) ++violations;
            }
        }
    }
    expect(out, checked > 0, "no measured zero-start solves");
    expect(out, violations == 0, std::to_string(violations) + " bound violations");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu solves, worst measured/bound = %.3f", checked, worst);
    out.detail << buf;
}

void criterion_kl_band(Outcome& out) {
    const auto& rep = kl_replica();
    const auto* zero = find_mode(rep, Mode::zero);
    const auto* acc = find_mode(rep, Mode::accelerated);
    const auto* nn = find_mode(rep, Mode::nearest_neighbor);
    expect(out, zero && !zero->failed && acc && !acc->failed && nn && !nn->failed,
           "replica run failed");
    const long long kz = zero->total_iterations;
    const long long ka = acc->total_iterations;
    const long long kn = nn->total_iterations;
    const double iter_sav = iteration_savings(kz, ka);
    expect(out, iter_sav >= 0.05 && iter_sav <= 0.25, "iteration savings outside [5%,25%]");
    expect(out, ka < kn && kn < kz, "nearest-neighbor K not between accelerated and zero");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "K zero=%lld nn=%lld acc=%lld savings=%.1f%%", kz, kn, ka,
                  100.0 * iter_sav);
    out.detail << buf;
}

void criterion_interpolated_pc(Outcome& out) {
    const auto diag = kl_pc_run(PcPolicy::diagonal);
    const auto ic0 = kl_pc_run(PcPolicy::incomplete_cholesky);
    const auto interp = kl_pc_run(PcPolicy::interpolated);
    const auto mean3 = [](const ExperimentReport& r) {
        return find_mode(r, Mode::zero)->levels[3].mean_iterations;
    };
    const double m_diag = mean3(diag);
    const double m_ic0 = mean3(ic0);
    const double m_interp = mean3(interp);
    expect(out, std::abs(m_interp - m_ic0) <= 0.10 * m_ic0,
           "interpolated preconditioner off per-point IC0 by more than 10%");
    expect(out, m_interp < m_diag, "interpolated preconditioner not below diagonal");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "level-3 means: diag=%.2f ic0=%.2f interpolated=%.2f",
                  m_diag, m_ic0, m_interp);
    out.detail << buf;
}

void criterion_nonlinear(Outcome& out) {
    for (const auto f : {Nonlinearity::power_five, Nonlinearity::u_times_du}) {
        const std::string tag = (f == Nonlinearity::power_five) ? "u^5" : "uu'";
        // iteration counts are deterministic; wall times are the median of
        // three repetitions so the asserted sign is not a timer artifact
        std::vector<double> sav4, sav2;
        double mean_zero4 = 0.0, mean_acc4 = 0.0;
        for (int rep_idx = 0; rep_idx < 3; ++rep_idx) {
            const auto rep = nonlinear_run(f);
            const auto* zero = find_mode(rep, Mode::zero);
            const auto* acc = find_mode(rep, Mode::accelerated);
            expect(out, zero && !zero->failed && acc && !acc->failed, tag + " run failed");
            mean_zero4 = zero->levels[4].mean_iterations;
            mean_acc4 = acc->levels[4].mean_iterations;
            double z4 = 0.0, a4 = 0.0, z2 = 0.0, a2 = 0.0;
            for (int w = 0; w <= 4; ++w) {
                z4 += zero->levels[static_cast<std::size_t>(w)].solve_wall_seconds;
                a4 += acc->levels[static_cast<std::size_t>(w)].solve_wall_seconds;
                if (w <= 2) {
                    z2 += zero->levels[static_cast<std::size_t>(w)].solve_wall_seconds;
                    a2 += acc->levels[static_cast<std::size_t>(w)].solve_wall_seconds;
                }
            }
            sav4.push_back((z4 - a4) / z4);
            sav2.push_back((z2 - a2) / z2);
        }
        std::sort(sav4.begin(), sav4.end());
        std::sort(sav2.begin(), sav2.end());
        expect(out, mean_acc4 < mean_zero4,
               tag + ": accelerated mean not below zero mean at level 4");
        expect(out, sav4[1] > 0.0, tag + ": no wall-clock savings through level 4");
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s: means L4 %.2f vs %.2f; median wall sav L2 %.0f%%, L4 %.0f%%;  ",
                      tag.c_str(), mean_zero4, mean_acc4, 100.0 * sav2[1], 100.0 * sav4[1]);
        out.detail << buf;
    }
}

void criterion_error_decay(Outcome& out) {
    const auto& rep = kl_replica();
    const auto* acc = find_mode(rep, Mode::accelerated);
    expect(out, acc && acc->error_curve.size() == 4, "missing error curve");
    for (int w = 1; w < 3; ++w) {
        expect(out,
               acc->error_curve[static_cast<std::size_t>(w)].second >
                   acc->error_curve[static_cast<std::size_t>(w + 1)].second,
               "error not decreasing at level " + std::to_string(w + 1));
    }
    out.detail << "errors:";
    char buf[48];
    for (const auto& [w, e] : acc->error_curve) {
        std::snprintf(buf, sizeof(buf), " %.2e", e);
        out.detail << buf;
    }
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "grid-counts", criterion_grid_counts},
        {2, "cost-model-arithmetic", criterion_cost_arithmetic},
        {3, "trig1d-savings-band", criterion_trig_band},
        {4, "per-level-shape", criterion_level_shape},
        {5, "solution-invariance", criterion_solution_invariance},
        {6, "delta-and-polynomial-exactness", criterion_delta_and_polynomials},
        {7, "quadrature-moments", criterion_quadrature_moments},
        {8, "lebesgue-inequality", criterion_lebesgue},
        {9, "per-solve-cg-bound", criterion_cg_bound},
        {10, "kl2d-savings-band", criterion_kl_band},
        {11, "interpolated-preconditioner", criterion_interpolated_pc},
        {12, "nonlinear-acceleration", criterion_nonlinear},
        {13, "error-decay-monotonicity", criterion_error_decay},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << "[exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %02d %-32s %6.1fs  %s\n", out.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), secs, out.detail.str().c_str());
        if (!out.pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
