#include "scaccel/solvers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace scaccel {

namespace {

bool all_finite(std::span<const double> v) {
    for (double c : v) {
        if (!std::isfinite(c)) return false;
    }
    return true;
}

// Factorization attempt for one diagonal shift; returns false on a bad pivot.
bool try_ic0(const CsrMatrix& a, double shift, CsrMatrix& lower) {
    const std::size_t n = a.rows();
    const auto off = a.row_offsets();
    const auto col = a.col_indices();
    const auto val = a.values();

    // Lower-triangular pattern of A (diagonal included).
    std::vector<Triplet> trips;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
            if (col[k] <= i) {
                double v = val[k];
                if (col[k] == i) v += shift * val[k];
                trips.push_back({i, col[k], v});
            }
        }
    }
    lower = CsrMatrix::from_triplets(n, std::move(trips));
    const auto loff = lower.row_offsets();
    const auto lcol = lower.col_indices();
    auto lval = lower.values_mutable();

    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0.0;
        for (std::size_t ki = loff[i]; ki < loff[i + 1]; ++ki) {
            const std::size_t j = lcol[ki];
            double s = lval[ki];
            // ordered merge over the strictly-lower parts of rows i and j
            std::size_t pi = loff[i];
            std::size_t pj = loff[j];
            while (pi < ki && pj < loff[j + 1] && lcol[pj] < j) {
                if (lcol[pi] == lcol[pj]) {
                    s -= lval[pi] * lval[pj];
                    ++pi;
                    ++pj;
                } else if (lcol[pi] < lcol[pj]) {
                    ++pi;
                } else {
                    ++pj;
                }
            }
            if (j < i) {
                const double djj = lower.at(j, j);
                lval[ki] = s / djj;
            } else {
                diag = s;
            }
        }
        if (!(diag > 0.0)) return false;
        lval[loff[i + 1] - 1] = std::sqrt(diag);
    }
    return true;
}

void forward_solve(const CsrMatrix& lower, std::span<const double> b, std::span<double> x) {
    const auto off = lower.row_offsets();
    const auto col = lower.col_indices();
    const auto val = lower.values();
    for (std::size_t i = 0; i < lower.rows(); ++i) {
        double s = b[i];
        double diag = 1.0;
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
            if (col[k] == i) {
                diag = val[k];
            } else {
                s -= val[k] * x[col[k]];
            }
        }
        x[i] = s / diag;
    }
}

void backward_solve(const CsrMatrix& upper, std::span<const double> b, std::span<double> x) {
    const auto off = upper.row_offsets();
    const auto col = upper.col_indices();
    const auto val = upper.values();
    for (std::size_t ii = upper.rows(); ii-- > 0;) {
        double s = b[ii];
        double diag = 1.0;
        for (std::size_t k = off[ii]; k < off[ii + 1]; ++k) {
            if (col[k] == ii) {
                diag = val[k];
            } else {
                s -= val[k] * x[col[k]];
            }
        }
        x[ii] = s / diag;
    }
}

} // namespace

Preconditioner Preconditioner::identity() {
    Preconditioner p;
    p.kind_ = PreconditionerKind::identity;
    return p;
}

Preconditioner Preconditioner::diagonal_of(const CsrMatrix& a) {
    Preconditioner p;
    p.kind_ = PreconditionerKind::diagonal;
    p.inv_diagonal_ = a.diagonal();
    for (double& d : p.inv_diagonal_) {
        if (!(d > 0.0)) throw std::runtime_error("diagonal preconditioner: nonpositive entry");
        d = 1.0 / d;
    }
    return p;
}

Preconditioner Preconditioner::interpolated(
    std::vector<std::pair<double, std::shared_ptr<const Preconditioner>>> terms) {
    Preconditioner p;
    p.kind_ = PreconditionerKind::interpolated;
    p.terms_ = std::move(terms);
    if (p.terms_.empty()) throw std::invalid_argument("interpolated preconditioner: no terms");
    return p;
}

void Preconditioner::apply(std::span<const double> r, std::span<double> z) const {
    switch (kind_) {
    case PreconditionerKind::identity:
        std::copy(r.begin(), r.end(), z.begin());
        return;
    case PreconditionerKind::diagonal:
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inv_diagonal_[i];
        return;
    case PreconditionerKind::incomplete_cholesky: {
        std::vector<double> tmp(r.size());
        forward_solve(lower_, r, tmp);
        backward_solve(lower_t_, tmp, z);
        return;
    }
    case PreconditionerKind::interpolated: {
        std::fill(z.begin(), z.end(), 0.0);
        std::vector<double> tmp(r.size());
        for (const auto& [w, base] : terms_) {
            if (w == 0.0) continue;
            base->apply(r, tmp);
            axpy(w, tmp, z);
        }
        return;
    }
    }
}

Preconditioner ic0_factor(const CsrMatrix& a) {
    Preconditioner p;
    p.kind_ = PreconditionerKind::incomplete_cholesky;
    double shift = 0.0;
    for (int attempt = 0; attempt <= 30; ++attempt) {
        if (try_ic0(a, shift, p.lower_)) {
            p.lower_t_ = p.lower_.transpose();
            return p;
        }
        shift = (shift == 0.0) ? 1e-12 : 2.0 * shift;
    }
    throw std::runtime_error("incomplete Cholesky failed after 30 diagonal shifts");
}

Preconditioner interpolate_preconditioner(
    const std::vector<std::shared_ptr<const Preconditioner>>& base,
    const CollocationGrid& grid, int pc_level, std::span<const double> y) {
    if (base.size() != grid.count_at(pc_level)) {
        throw std::invalid_argument("need one base preconditioner per grid point");
    }
    const auto weights = sparse_basis_weights(grid, pc_level, y);
    std::vector<std::pair<double, std::shared_ptr<const Preconditioner>>> terms;
    terms.reserve(weights.size());
    for (const auto& [id, w] : weights) {
        if (!base[id]) throw std::invalid_argument("missing base preconditioner");
        terms.emplace_back(w, base[id]);
    }
    return Preconditioner::interpolated(std::move(terms));
}

namespace {

struct CgOutcome {
    std::vector<double> x;
    SolveReport report;
    bool indefinite = false; // preconditioned inner product went nonpositive
};

CgOutcome run_cg(const AssembledSystem& system, std::span<const double> x0,
                 const Preconditioner& pc, StopRule stop, int max_iterations) {
    const CsrMatrix& a = system.matrix;
    const std::size_t n = a.rows();
    CgOutcome out;
    out.x.assign(x0.begin(), x0.end());

    std::vector<double> r(n);
    a.multiply(out.x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = system.rhs[i] - r[i];

    std::vector<double> z(n);
    pc.apply(r, z);
    double rho = dot(r, z);
    if (rho < 0.0) {
        out.indefinite = true;
        return out;
    }

    double threshold = stop.tol;
    if (stop.kind == StopRule::Kind::relative) {
        std::vector<double> bz(n);
        pc.apply(system.rhs, bz);
        const double bnorm = std::sqrt(std::max(0.0, dot(system.rhs, bz)));
        threshold = stop.tol * bnorm;
    }

    std::vector<double> p(z);
    std::vector<double> q(n);
    while (true) {
        if (std::sqrt(std::max(0.0, rho)) <= threshold) {
            out.report.converged = true;
            break;
        }
        if (out.report.iterations >= max_iterations) break;

        a.multiply(p, q);
        const double p_ap = dot(p, q);
        if (!(p_ap > 0.0)) {
            if (std::isfinite(p_ap)) {
                out.indefinite = true;
                return out;
            }
            throw std::runtime_error("cg: non-finite curvature");
        }
        const double alpha = rho / p_ap;
        axpy(alpha, p, out.x);
        axpy(-alpha, q, r);
        pc.apply(r, z);
        const double rho_new = dot(r, z);
        if (!std::isfinite(rho_new)) throw std::runtime_error("cg: non-finite residual");
        if (rho_new < 0.0) {
            out.indefinite = true;
            return out;
        }
        const double beta = rho_new / rho;
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++out.report.iterations;
    }

    a.multiply(out.x, q);
    for (std::size_t i = 0; i < n; ++i) q[i] -= system.rhs[i];
    out.report.final_residual = norm2(q);
    return out;
}

} // namespace

std::pair<std::vector<double>, SolveReport>
cg_solve(const AssembledSystem& system, std::span<const double> x0,
         const Preconditioner& pc, StopRule stop, int max_iterations) {
    const std::size_t n = system.matrix.rows();
    if (x0.size() != n || system.rhs.size() != n) {
        throw std::invalid_argument("cg: size mismatch");
    }
    if (!all_finite(x0) || !all_finite(system.rhs) || !all_finite(system.matrix.values())) {
        throw std::runtime_error("cg: non-finite input");
    }
    if (!(stop.tol > 0.0)) throw std::invalid_argument("cg: tolerance must be positive");

    CgOutcome out = run_cg(system, x0, pc, stop, max_iterations);
    if (out.indefinite) {
        if (pc.kind() != PreconditionerKind::interpolated) {
            throw std::runtime_error("cg: preconditioner not positive definite");
        }
        const Preconditioner fallback = Preconditioner::diagonal_of(system.matrix);
        out = run_cg(system, x0, fallback, stop, max_iterations);
        if (out.indefinite) throw std::runtime_error("cg: diagonal fallback failed");
        out.report.preconditioner_fallback = true;
    }
    return {std::move(out.x), out.report};
}

std::pair<std::vector<double>, SolveReport>
nonlinear_solve(const ProblemSpec& problem, const Mesh& mesh, std::span<const double> y_ref,
                std::span<const double> x0, double rel_tol, int max_iterations) {
    if (problem.nonlinearity == Nonlinearity::none) {
        throw std::invalid_argument("nonlinear_solve needs a nonlinear problem");
    }
    if (!(rel_tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const std::size_t n = mesh.free_dof_count();
    if (x0.size() != n) throw std::invalid_argument("initial guess size mismatch");

    constexpr double kPicardToNewton = 1e-2; // relative-step switch point
    constexpr int kMaxPicardIterations = 25; // fixed-point warm-up budget

    auto to_dense = [n](const CsrMatrix& m) {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
        const auto off = m.row_offsets();
        const auto col = m.col_indices();
        const auto val = m.values();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col[k])) = val[k];
            }
        }
        return d;
    };

    SolveReport report;
    report.guess = GuessSource::zero;
    std::vector<double> c(x0.begin(), x0.end());

    const AssembledSystem linear = assemble(problem, mesh, y_ref);
    std::vector<double> r = nonlinear_residual(problem, mesh, y_ref, c);

    // Entry shortcut: an (essentially) exact initial guess costs no iterations.
    const double entry_scale = 1.0 + norm2(linear.rhs);
    if (norm2(r) <= 1e-12 * entry_scale) {
        report.converged = true;
        report.final_residual = norm2(r);
        return {std::move(c), report};
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> stiffness_lu(to_dense(linear.matrix));

    bool newton_phase = false;
    bool restarted = false;
    double prev_step = std::numeric_limits<double>::infinity();
    double prev_residual = norm2(r);
    int growth_streak = 0;
    int stall_streak = 0;

    for (int it = 0; it < max_iterations; ++it) {
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n));
        Eigen::VectorXd delta;
        double damping = 1.0;
        bool have_residual = false;
        std::vector<double> accepted_residual;
        if (!newton_phase) {
            delta = stiffness_lu.solve(rv);
            ++report.picard_iterations;
            for (std::size_t i = 0; i < n; ++i) c[i] += delta(static_cast<Eigen::Index>(i));
        } else {
            const CsrMatrix jac = tangent_matrix(problem, mesh, y_ref, c);
            delta = Eigen::PartialPivLU<Eigen::MatrixXd>(to_dense(jac)).solve(rv);
            ++report.newton_iterations;
            // backtracking on the residual norm; the analytic tangent makes
            // the Newton direction a descent direction for ||r||
            std::vector<double> trial(n);
            while (true) {
                for (std::size_t i = 0; i < n; ++i) {
                    trial[i] = c[i] + damping * delta(static_cast<Eigen::Index>(i));
                }
                if (damping < 1.0 / 1024.0) break;
                if (all_finite(trial)) {
                    accepted_residual = nonlinear_residual(problem, mesh, y_ref, trial);
                    if (norm2(accepted_residual) <= (1.0 - 1e-4 * damping) * prev_residual) {
                        have_residual = true;
                        break;
                    }
                }
                damping *= 0.5;
            }
            c = trial;
            stall_streak = (damping < 1.0 / 1024.0) ? stall_streak + 1 : 0;
        }
        ++report.iterations;

        if (!all_finite(c) || stall_streak >= 2) {
            // a blown-up fixed-point excursion: retry once as pure Newton
            if (!restarted && !all_finite(c)) {
                restarted = true;
                newton_phase = true;
                c.assign(x0.begin(), x0.end());
                r = nonlinear_residual(problem, mesh, y_ref, c);
                prev_residual = norm2(r);
                prev_step = std::numeric_limits<double>::infinity();
                growth_streak = 0;
                stall_streak = 0;
                continue;
            }
            report.converged = false;
            if (all_finite(c)) {
                r = nonlinear_residual(problem, mesh, y_ref, c);
                report.final_residual = norm2(r);
            }
            return {std::move(c), report};
        }

        const double step = damping * delta.norm() / std::max(norm2(c), 1e-300);
        if (step < rel_tol) {
            report.converged = true;
            break;
        }

        r = have_residual ? std::move(accepted_residual)
                          : nonlinear_residual(problem, mesh, y_ref, c);
        const double residual = norm2(r);

        if (!newton_phase) {
            // hand over to Newton once the fixed point is near (small steps),
            // when the fixed-point map stops reducing the residual, or after
            // the warm-up budget runs out
            if (step < kPicardToNewton || residual > prev_residual ||
                report.picard_iterations >= kMaxPicardIterations) {
                newton_phase = true;
                growth_streak = 0;
                prev_step = std::numeric_limits<double>::infinity();
            }
        } else if (step > 1.05 * prev_step) { // significant growth only
            if (++growth_streak >= 5) {
                report.converged = false;
                report.final_residual = residual;
                return {std::move(c), report};
            }
        } else {
            growth_streak = 0;
        }
        prev_step = step;
        prev_residual = residual;
    }

    r = nonlinear_residual(problem, mesh, y_ref, c);
    report.final_residual = norm2(r);
    return {std::move(c), report};
}

} // namespace scaccel
