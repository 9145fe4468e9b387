#pragma once

#include <span>
#include <vector>

#include "scaccel/mesh.hpp"
#include "scaccel/model_problems.hpp"
#include "scaccel/sparse_matrix.hpp"

namespace scaccel {

/// SPD stiffness system A(y) c = f(y) for one collocation sample, with
/// Dirichlet dofs eliminated.
struct AssembledSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    std::vector<double> parameter; // reference-cube sample the system belongs to
    int quadrature_order = 3;
};

/// Assembles the a(.,y)-weighted stiffness matrix and load vector with
/// per-element Gauss quadrature (3-point in 1D, mid-edge rule in 2D) and
/// row/column elimination of Dirichlet dofs. Neumann end conditions add
/// a(x_b, y) * g * phi_i(x_b) to the load.
AssembledSystem assemble(const ProblemSpec& problem, const Mesh& mesh,
                         std::span<const double> y_ref);

/// Residual of the nonlinear weak form at coefficients c:
/// r_i = (f, phi_i) + Neumann terms - (a grad u_c, grad phi_i) - (F[u_c], phi_i).
std::vector<double> nonlinear_residual(const ProblemSpec& problem, const Mesh& mesh,
                                       std::span<const double> y_ref,
                                       std::span<const double> coeffs);

/// Tangent (Jacobian) of the nonlinear residual: stiffness plus the Gateaux
/// derivative of the reaction term. Nonsymmetric for the u*u' nonlinearity.
CsrMatrix tangent_matrix(const ProblemSpec& problem, const Mesh& mesh,
                         std::span<const double> y_ref, std::span<const double> coeffs);

/// Mass matrix on the free dofs (exact for linear elements).
CsrMatrix assemble_mass(const Mesh& mesh);

/// L2(D) norm of the FE function with the given free-dof coefficients.
double l2_norm(const CsrMatrix& mass, std::span<const double> coeffs);

/// Condition number lambda_max/lambda_min of an SPD matrix, estimated by
/// power iteration and inverse power iteration (inner CG solves), both run to
/// the given relative tolerance on the Rayleigh quotient.
double estimate_condition(const CsrMatrix& matrix, double rel_tol = 1e-4);

} // namespace scaccel
