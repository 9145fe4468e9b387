#pragma once

#include <span>
#include <string>
#include <vector>

#include "scaccel/sparse_grid.hpp"

namespace scaccel {

/// Box-shaped parameter domain; collocation points live on the reference cube
/// [-1,1]^N and are mapped affinely into the box where needed.
struct ParameterDomain {
    std::vector<double> lo;
    std::vector<double> hi;

    static ParameterDomain symmetric(int n_dims, double half_width);

    int dims() const { return static_cast<int>(lo.size()); }
    std::vector<double> to_physical(std::span<const double> y_ref) const;
    bool contains(std::span<const double> y_physical) const;
};

enum class CoefficientKind { trig_log, kl_expansion, constant };
enum class Nonlinearity { none, power_five, u_times_du };
enum class ForcingKind { constant, cos_x1_sin_x2, coordinate_x1 };

/// 1 + exp of a four-mode trigonometric expansion in x; strictly > 1 for all
/// x in [0,1], y in [-1,1]^4.
double trig_log_coefficient(double x, std::span<const double> y);

/// Eigenvalue magnitude of the n-th expansion term (n >= 2) for the
/// exponential covariance with correlation length `correlation_length`.
double kl_eigenvalue(int n, double correlation_length);

/// Matching eigenfunction at x1: sine for even n, cosine for odd n >= 3.
double kl_eigenfunction(int n, double x1, double correlation_length);

/// 0.5 + exp of the N-term truncated expansion; y in physical coordinates
/// [-sqrt(3), sqrt(3)]^N, N = y.size(). Strictly > 0.5.
double kl_coefficient(double x1, std::span<const double> y, double correlation_length);

/// Fixed a-posteriori anisotropy weights shipped for the 11-term expansion.
AnisotropyWeights kl_anisotropy_weights();

struct CoefficientField {
    CoefficientKind kind = CoefficientKind::constant;
    double constant_value = 1.0;
    double correlation_length = 0.5; // kl_expansion only
    int truncation = 1;              // kl_expansion only

    /// Evaluates a(x, y) with y in physical parameter coordinates.
    double evaluate(std::span<const double> x, std::span<const double> y_physical) const;
};

struct BoundarySpec {
    enum class Kind { dirichlet, neumann } kind = Kind::dirichlet;
    double value = 0.0;
};

/// One parametrized PDE instance: coefficient field, forcing, boundary
/// conditions and (optionally, 1D only) a nonlinear reaction term.
struct ProblemSpec {
    std::string name;
    int spatial_dim = 1;
    CoefficientField coefficient;
    ParameterDomain domain;
    ForcingKind forcing = ForcingKind::constant;
    double forcing_value = 0.0;
    BoundarySpec left;  // 1D ends; 2D problems are all-Dirichlet homogeneous
    BoundarySpec right;
    Nonlinearity nonlinearity = Nonlinearity::none;

    bool is_linear() const { return nonlinearity == Nonlinearity::none; }

    /// a(x, y_ref) with y_ref on the reference cube; the affine map into the
    /// physical parameter box happens here.
    double coefficient_at(std::span<const double> x, std::span<const double> y_ref) const;

    double forcing_at(std::span<const double> x) const;
};

ProblemSpec make_trig_diffusion_1d();
ProblemSpec make_kl_diffusion_2d(int n_dims, double correlation_length);
ProblemSpec make_nonlinear_1d(Nonlinearity f);
ProblemSpec make_constant_coefficient_1d(int n_dims);

} // namespace scaccel
