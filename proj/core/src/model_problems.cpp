#include "scaccel/model_problems.hpp"

#include <cmath>
#include <stdexcept>

namespace scaccel {

ParameterDomain ParameterDomain::symmetric(int n_dims, double half_width) {
    if (n_dims < 1) throw std::domain_error("parameter dimension must be positive");
    if (!(half_width > 0.0)) throw std::domain_error("half width must be positive");
    ParameterDomain d;
    d.lo.assign(static_cast<std::size_t>(n_dims), -half_width);
    d.hi.assign(static_cast<std::size_t>(n_dims), half_width);
    return d;
}

std::vector<double> ParameterDomain::to_physical(std::span<const double> y_ref) const {
    if (y_ref.size() != lo.size()) throw std::invalid_argument("parameter dimension mismatch");
    std::vector<double> y(lo.size());
    for (std::size_t n = 0; n < lo.size(); ++n) {
        y[n] = 0.5 * (lo[n] + hi[n]) + 0.5 * y_ref[n] * (hi[n] - lo[n]);
    }
    return y;
}

bool ParameterDomain::contains(std::span<const double> y_physical) const {
    if (y_physical.size() != lo.size()) return false;
    for (std::size_t n = 0; n < lo.size(); ++n) {
        if (!(y_physical[n] >= lo[n] && y_physical[n] <= hi[n])) return false;
    }
    return true;
}

double trig_log_coefficient(double x, std::span<const double> y) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("x outside [0,1]");
    if (y.size() != 4) throw std::invalid_argument("expected 4 parameters");
    for (double c : y) {
        if (!(c >= -1.0 && c <= 1.0)) throw std::domain_error("parameter outside [-1,1]");
    }
    const double s = y[0] * std::cos(M_PI * x) + y[1] * std::sin(M_PI * x) +
                     y[2] * std::cos(2.0 * M_PI * x) + y[3] * std::sin(2.0 * M_PI * x);
    return 1.0 + std::exp(std::exp(-0.125) * s);
}

namespace {

double kl_period(double correlation_length) {
    return std::max(1.0, 2.0 * correlation_length); // R_p
}

} // namespace

double kl_eigenvalue(int n, double correlation_length) {
    if (n < 2) throw std::domain_error("expansion eigenvalues start at n = 2");
    if (!(correlation_length > 0.0)) throw std::domain_error("correlation length must be positive");
    const double rp = kl_period(correlation_length);
    const double r = correlation_length / rp;
    const double k = static_cast<double>(n / 2);
    const double arg = k * M_PI * r;
    return std::sqrt(std::sqrt(M_PI) * r) * std::exp(-arg * arg / 8.0);
}

double kl_eigenfunction(int n, double x1, double correlation_length) {
    if (n < 2) throw std::domain_error("expansion eigenfunctions start at n = 2");
    const double rp = kl_period(correlation_length);
    const double k = static_cast<double>(n / 2);
    const double arg = k * M_PI * x1 / rp;
    return (n % 2 == 0) ? std::sin(arg) : std::cos(arg);
}

double kl_coefficient(double x1, std::span<const double> y, double correlation_length) {
    const int n_terms = static_cast<int>(y.size());
    if (n_terms < 1) throw std::domain_error("expansion needs at least one term");
    if (!(correlation_length > 0.0)) throw std::domain_error("correlation length must be positive");
    const double bound = std::sqrt(3.0);
    for (double c : y) {
        if (!(c >= -bound && c <= bound)) {
            throw std::domain_error("parameter outside [-sqrt(3), sqrt(3)]");
        }
    }
    const double rp = kl_period(correlation_length);
    const double r = correlation_length / rp;
    double s = 1.0 + y[0] * std::sqrt(std::sqrt(M_PI) * r / 2.0);
    for (int n = 2; n <= n_terms; ++n) {
        s += kl_eigenvalue(n, correlation_length) * kl_eigenfunction(n, x1, correlation_length) *
             y[static_cast<std::size_t>(n - 1)];
    }
    return 0.5 + std::exp(s);
}

AnisotropyWeights kl_anisotropy_weights() {
    return AnisotropyWeights({0.85, 0.8, 0.8, 1.0, 1.0, 1.6, 1.6, 2.6, 2.6, 3.7, 3.7});
}

double CoefficientField::evaluate(std::span<const double> x,
                                  std::span<const double> y_physical) const {
    switch (kind) {
    case CoefficientKind::constant:
        return constant_value;
    case CoefficientKind::trig_log:
        return trig_log_coefficient(x[0], y_physical);
    case CoefficientKind::kl_expansion:
        if (static_cast<int>(y_physical.size()) != truncation) {
            throw std::invalid_argument("expansion truncation / parameter mismatch");
        }
        return kl_coefficient(x[0], y_physical, correlation_length);
    }
    throw std::logic_error("unknown coefficient kind");
}

double ProblemSpec::coefficient_at(std::span<const double> x,
                                   std::span<const double> y_ref) const {
    const auto y = domain.to_physical(y_ref);
    return coefficient.evaluate(x, y);
}

double ProblemSpec::forcing_at(std::span<const double> x) const {
    switch (forcing) {
    case ForcingKind::constant:
        return forcing_value;
    case ForcingKind::cos_x1_sin_x2:
        return std::cos(x[0]) * std::sin(x[1]);
    case ForcingKind::coordinate_x1:
        return x[0];
    }
    throw std::logic_error("unknown forcing kind");
}

ProblemSpec make_trig_diffusion_1d() {
    ProblemSpec p;
    p.name = "trig1d";
    p.spatial_dim = 1;
    p.coefficient.kind = CoefficientKind::trig_log;
    p.domain = ParameterDomain::symmetric(4, 1.0);
    p.forcing = ForcingKind::constant;
    p.forcing_value = 10.0;
    p.left = {BoundarySpec::Kind::dirichlet, 0.0};
    p.right = {BoundarySpec::Kind::dirichlet, 0.0};
    return p;
}

ProblemSpec make_kl_diffusion_2d(int n_dims, double correlation_length) {
    if (n_dims < 1) throw std::domain_error("parameter dimension must be positive");
    ProblemSpec p;
    p.name = "kl2d";
    p.spatial_dim = 2;
    p.coefficient.kind = CoefficientKind::kl_expansion;
    p.coefficient.correlation_length = correlation_length;
    p.coefficient.truncation = n_dims;
    p.domain = ParameterDomain::symmetric(n_dims, std::sqrt(3.0));
    p.forcing = ForcingKind::cos_x1_sin_x2;
    return p;
}

ProblemSpec make_nonlinear_1d(Nonlinearity f) {
    if (f == Nonlinearity::none) throw std::invalid_argument("pick a nonlinearity");
    ProblemSpec p;
    p.name = (f == Nonlinearity::power_five) ? "nonlinear1d_u5" : "nonlinear1d_uup";
    p.spatial_dim = 1;
    p.coefficient.kind = CoefficientKind::trig_log;
    p.domain = ParameterDomain::symmetric(4, 1.0);
    p.forcing = ForcingKind::coordinate_x1;
    p.left = {BoundarySpec::Kind::dirichlet, 0.0};
    p.right = {BoundarySpec::Kind::neumann, 1.0};
    p.nonlinearity = f;
    return p;
}

ProblemSpec make_constant_coefficient_1d(int n_dims) {
    if (n_dims < 1) throw std::domain_error("parameter dimension must be positive");
    ProblemSpec p;
    p.name = "constant";
    p.spatial_dim = 1;
    p.coefficient.kind = CoefficientKind::constant;
    p.coefficient.constant_value = 1.0;
    p.domain = ParameterDomain::symmetric(n_dims, 1.0);
    p.forcing = ForcingKind::constant;
    p.forcing_value = 10.0;
    p.left = {BoundarySpec::Kind::dirichlet, 0.0};
    p.right = {BoundarySpec::Kind::dirichlet, 0.0};
    return p;
}

} // namespace scaccel
