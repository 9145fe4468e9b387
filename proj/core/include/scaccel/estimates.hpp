#pragma once

#include <cstddef>
#include <span>

namespace scaccel {

/// Constants entering the closed-form work and error bounds. The decay
/// constants (c_fem, c_sc, decay_rate) are typically fitted from measured
/// error curves; the rest are problem data.
struct EstimateParams {
    int n_dims = 1;
    double fe_rate = 1.0;             // s: FE convergence rate h^s
    double c_fem = 1.0;               // FE error constant
    double c_sc = 1.0;                // interpolation error constant
    double decay_rate = 1.0;          // r in exp(-r N 2^(L/N))
    double continuity = 1.0;          // alpha: bilinear-form continuity
    double coercivity = 1.0;          // beta: coercivity
    double condition_constant = 1.0;  // C_kappa in kappa <= (C_kappa/h)^2
    double solution_norm_bound = 1.0; // sup over the parameter box of ||u_h||_H1
    long long cost_per_matvec = 5;    // C_D
};

/// Mesh size meeting the FE error budget eps/3: (eps / (3 c_fem))^(1/s).
double mesh_size_for(const EstimateParams& p, double eps);

/// Smallest interpolation level meeting the SC error budget eps/3 (clamped
/// at 0). Throws std::domain_error when eps >= 3 c_sc.
int max_level_for(const EstimateParams& p, double eps);

/// Solver tolerance meeting the amplified-solver-error budget eps/3:
/// sqrt(beta) eps / (3 (lmax+2)^(2N)).
double solver_tolerance_for(const EstimateParams& p, double eps, int lmax);

/// Closed-form Lebesgue-constant bound [(L+1)(L+2)]^N.
double lebesgue_bound(int level, int n_dims);

/// Iteration bound for one CG solve from the convergence estimate:
/// log(2 e0 / tau) / log((sqrt(kappa)+1)/(sqrt(kappa)-1)), clamped at 0.
/// e0 is the A-norm of the initial error (||c||_A for a zero start).
double cg_iteration_bound(double initial_error_a_norm, double tau, double kappa);

struct PerSolveBounds {
    double k_zero;
    double k_acc;
};

/// Per-solve bounds with the zero start and with the interpolant start at a
/// given level, using the params' continuity/decay constants.
PerSolveBounds iteration_bounds(const EstimateParams& p, double tau, double kappa_bar,
                                int level);

/// Point-count bound M_L <= 2 e^(N-1) 2^L (1 + L/(N-1))^(N-1).
double point_count_bound(int level, int n_dims);

struct TotalBounds {
    double k_zero;             // total CG iterations, zero starts
    double k_acc;              // total CG iterations, accelerated starts
    double interpolation_cost; // C_int bound
    double point_count;        // M_L bound at the chosen level
    int level;                 // L_max(eps)
    double mesh_size;          // h(eps)
    double tau;                // tau(eps)
};

/// Evaluates the asymptotic work bounds at accuracy eps, choosing h, L_max
/// and tau by the error split and bounding kappa by (C_kappa/h)^2.
TotalBounds total_bounds(const EstimateParams& p, double eps, std::size_t m_h);

struct FittedDecay {
    double constant;
    double rate;
};

/// Least-squares fit of errors ~ constant * exp(-rate * N * 2^(level/N)).
FittedDecay fit_sc_decay(std::span<const int> levels, std::span<const double> errors,
                         int n_dims);

/// Least-squares fit of errors ~ constant * h^rate.
FittedDecay fit_fem_rate(std::span<const double> mesh_sizes, std::span<const double> errors);

} // namespace scaccel
