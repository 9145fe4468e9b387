#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "scaccel/fem.hpp"
#include "scaccel/interpolant.hpp"
#include "scaccel/sparse_matrix.hpp"

namespace scaccel {

enum class PreconditionerKind { identity, diagonal, incomplete_cholesky, interpolated };

/// Linear operator z = P^{-1} r used inside CG. The interpolated kind applies
/// a Lagrange-weighted sum of base inverse applications; it is symmetric but
/// not guaranteed definite (weights can be negative).
class Preconditioner {
public:
    static Preconditioner identity();
    static Preconditioner diagonal_of(const CsrMatrix& a);
    static Preconditioner interpolated(
        std::vector<std::pair<double, std::shared_ptr<const Preconditioner>>> terms);

    PreconditionerKind kind() const { return kind_; }
    void apply(std::span<const double> r, std::span<double> z) const;

    friend Preconditioner ic0_factor(const CsrMatrix& a);

private:
    Preconditioner() = default;

    PreconditionerKind kind_ = PreconditionerKind::identity;
    std::vector<double> inv_diagonal_;
    CsrMatrix lower_;      // IC0 factor L (lower triangular, diag included)
    CsrMatrix lower_t_;    // L^T for the backward solve
    std::vector<std::pair<double, std::shared_ptr<const Preconditioner>>> terms_;
};

/// Zero-fill incomplete Cholesky on the sparsity pattern of a. Nonpositive
/// pivots trigger a diagonal shift retry (delta doubling from 1e-12, at most
/// 30 shifts) before failing.
Preconditioner ic0_factor(const CsrMatrix& a);

/// Remark-style preconditioner interpolation: application is
/// r -> sum_j Psi_j(y) * apply(base_j, r) with sparse-grid Lagrange weights
/// over H_pc_level. One base preconditioner per point of H_pc_level.
Preconditioner interpolate_preconditioner(
    const std::vector<std::shared_ptr<const Preconditioner>>& base,
    const CollocationGrid& grid, int pc_level, std::span<const double> y);

struct StopRule {
    enum class Kind { absolute, relative } kind = Kind::absolute;
    double tol = 1e-8;
};

enum class GuessSource { zero, interpolant, nearest_neighbor };

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0; // true 2-norm residual at exit
    bool converged = false;
    GuessSource guess = GuessSource::zero;
    bool preconditioner_fallback = false; // interpolated PC went indefinite
    long long flops = 0;                  // cost-model estimate, filled by the caller
    int picard_iterations = 0;            // nonlinear solves only
    int newton_iterations = 0;
};

/// Preconditioned CG from x0, counting iterations until the preconditioned
/// residual norm sqrt(r' P^{-1} r) meets the stop rule (relative rules scale
/// by the right-hand side norm). An indefinite interpolated preconditioner is
/// detected at run time and the solve restarts with a diagonal preconditioner.
std::pair<std::vector<double>, SolveReport>
cg_solve(const AssembledSystem& system, std::span<const double> x0,
         const Preconditioner& pc, StopRule stop, int max_iterations);

/// Composite Picard -> Newton solver for the nonlinear 1D problems. Picard
/// iterations (lagged reaction term, fixed stiffness factorization) run until
/// the relative step drops below 1e-2, then Newton with the analytic tangent
/// until the relative l2 step is below rel_tol. Inner systems use a direct
/// dense factorization. Reported iterations count all outer iterations.
std::pair<std::vector<double>, SolveReport>
nonlinear_solve(const ProblemSpec& problem, const Mesh& mesh, std::span<const double> y_ref,
                std::span<const double> x0, double rel_tol, int max_iterations = 200);

} // namespace scaccel
