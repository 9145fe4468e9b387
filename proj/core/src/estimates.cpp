#include "scaccel/estimates.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace scaccel {

namespace {

constexpr double kLog2 = 0.6931471805599453;

double kappa_denominator(double kappa_bar) {
    if (!(kappa_bar > 1.0)) throw std::domain_error("condition number must exceed 1");
    const double s = std::sqrt(kappa_bar);
    return std::log((s + 1.0) / (s - 1.0));
}

} // namespace

double mesh_size_for(const EstimateParams& p, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("accuracy must be positive");
    return std::pow(eps / (3.0 * p.c_fem), 1.0 / p.fe_rate);
}

int max_level_for(const EstimateParams& p, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("accuracy must be positive");
    if (eps >= 3.0 * p.c_sc) throw std::domain_error("accuracy too loose for the decay model");
    const double inner = std::log(3.0 * p.c_sc / eps) / (p.decay_rate * p.n_dims);
    if (inner <= 1.0) return 0;
    const double level = p.n_dims / kLog2 * std::log(inner);
    return std::max(0, static_cast<int>(std::ceil(level)));
}

double solver_tolerance_for(const EstimateParams& p, double eps, int lmax) {
    if (!(eps > 0.0)) throw std::domain_error("accuracy must be positive");
    return std::sqrt(p.coercivity) * eps /
           (3.0 * std::pow(lmax + 2.0, 2.0 * p.n_dims));
}

double lebesgue_bound(int level, int n_dims) {
    if (level < 0) throw std::domain_error("level must be >= 0");
    return std::pow((level + 1.0) * (level + 2.0), n_dims);
}

double cg_iteration_bound(double initial_error_a_norm, double tau, double kappa) {
    if (!(tau > 0.0)) throw std::domain_error("tolerance must be positive");
    const double denom = kappa_denominator(kappa);
    const double num = std::log(2.0 * initial_error_a_norm / tau);
    return std::max(0.0, num / denom);
}

PerSolveBounds iteration_bounds(const EstimateParams& p, double tau, double kappa_bar,
                                int level) {
    if (!(tau > 0.0)) throw std::domain_error("tolerance must be positive");
    const double denom = kappa_denominator(kappa_bar);
    const double sqrt_alpha = std::sqrt(p.continuity);
    PerSolveBounds b{};
    b.k_zero = std::max(
        0.0, std::log(2.0 * sqrt_alpha * p.solution_norm_bound / tau) / denom);
    const double decay =
        std::exp(-p.decay_rate * p.n_dims * std::pow(2.0, (level - 1.0) / p.n_dims));
    b.k_acc = std::max(0.0, std::log(4.0 * sqrt_alpha * p.c_sc * decay / tau) / denom);
    return b;
}

double point_count_bound(int level, int n_dims) {
    if (level < 0) throw std::domain_error("level must be >= 0");
    if (n_dims < 1) throw std::domain_error("dimension must be positive");
    const double pow2 = std::pow(2.0, level);
    if (n_dims == 1) return 2.0 * pow2;
    const double nm1 = n_dims - 1.0;
    return 2.0 * std::exp(nm1) * pow2 * std::pow(1.0 + level / nm1, nm1);
}

TotalBounds total_bounds(const EstimateParams& p, double eps, std::size_t m_h) {
    const int n = p.n_dims;
    TotalBounds out{};
    out.mesh_size = mesh_size_for(p, eps);
    out.level = max_level_for(p, eps);
    out.tau = solver_tolerance_for(p, eps, out.level);

    const double log_sc = std::log(3.0 * p.c_sc / eps);
    if (!(log_sc > 1.0)) throw std::domain_error("accuracy too loose for the decay model");
    const double inner = log_sc / (p.decay_rate * n);
    if (!(inner > 1.0)) throw std::domain_error("accuracy too loose: inner log nonpositive");
    const double loglog_sc = std::log(log_sc);

    const double c1 = std::pow(M_E / kLog2, n - 1.0) * std::pow(2.0 / (p.decay_rate * n), n);
    const double c2 = 1.0 + std::log(1.0 / (p.decay_rate * n)) / kLog2;
    const double c3 = 6.0 * std::sqrt(p.continuity / p.coercivity) * p.solution_norm_bound;
    const double c4 = 2.0 * n * std::log(2.0 * n / kLog2);
    const double c5 = c4 + std::log(4.0 * std::sqrt(p.continuity / p.coercivity));
    const double c8 = 64.0 * std::exp(2.0 * (n - 1.0));

    const double level_factor = c2 + loglog_sc / kLog2;
    if (!(level_factor > 0.0)) throw std::domain_error("accuracy too loose: level factor nonpositive");

    const double kappa_bar = std::pow(p.condition_constant / out.mesh_size, 2.0);
    const double denom = kappa_denominator(kappa_bar);

    const double common = c1 * std::pow(log_sc, n) * std::pow(level_factor, n - 1.0) / denom;
    const double tail = 2.0 * n * std::log(std::log(inner)); // 2N loglog[(1/rN) log(3Csc/eps)]
    out.k_zero = common * (std::log(c3 / eps) + c4 + tail);
    out.k_acc = common * (c5 + 2.0 * (std::pow(2.0, 1.0 / n) - 1.0) * log_sc + tail);

    out.interpolation_cost = static_cast<double>(m_h) * c8 * std::pow(inner, 2.0 * n) *
                             std::pow(level_factor, 2.0 * (n - 1.0));
    out.point_count = point_count_bound(out.level, n);
    return out;
}

namespace {

FittedDecay linear_fit(std::span<const double> x, std::span<const double> log_y) {
    const std::size_t m = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += log_y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * log_y[i];
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("degenerate fit data");
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    return {std::exp(intercept), slope};
}

} // namespace

FittedDecay fit_sc_decay(std::span<const int> levels, std::span<const double> errors,
                         int n_dims) {
    if (levels.size() != errors.size() || levels.size() < 2) {
        throw std::invalid_argument("need at least two (level, error) pairs");
    }
    std::vector<double> x(levels.size());
    std::vector<double> log_y(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(errors[i] > 0.0)) throw std::domain_error("errors must be positive");
        x[i] = std::pow(2.0, static_cast<double>(levels[i]) / n_dims);
        log_y[i] = std::log(errors[i]);
    }
    FittedDecay fit = linear_fit(x, log_y);
    return {fit.constant, -fit.rate / n_dims};
}

FittedDecay fit_fem_rate(std::span<const double> mesh_sizes, std::span<const double> errors) {
    if (mesh_sizes.size() != errors.size() || mesh_sizes.size() < 2) {
        throw std::invalid_argument("need at least two (h, error) pairs");
    }
    std::vector<double> x(mesh_sizes.size());
    std::vector<double> log_y(mesh_sizes.size());
    for (std::size_t i = 0; i < mesh_sizes.size(); ++i) {
        if (!(mesh_sizes[i] > 0.0 && errors[i] > 0.0)) {
            throw std::domain_error("mesh sizes and errors must be positive");
        }
        x[i] = std::log(mesh_sizes[i]);
        log_y[i] = std::log(errors[i]);
    }
    return linear_fit(x, log_y);
}

} // namespace scaccel
