#include "scaccel/fem.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace scaccel {

namespace {

// 3-point Gauss-Legendre on [0,1].
constexpr std::array<double, 3> kGaussX = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr std::array<double, 3> kGaussW = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

double nonlinear_term(Nonlinearity f, double u, double du) {
    switch (f) {
    case Nonlinearity::none:
        return 0.0;
    case Nonlinearity::power_five:
        return u * u * u * u * u;
    case Nonlinearity::u_times_du:
        return u * du;
    }
    return 0.0;
}

void check_parameter(const ProblemSpec& problem, const Mesh& mesh,
                     std::span<const double> y_ref) {
    if (problem.spatial_dim != mesh.dim()) {
        throw std::invalid_argument("problem/mesh spatial dimension mismatch");
    }
    if (static_cast<int>(y_ref.size()) != problem.domain.dims()) {
        throw std::invalid_argument("parameter dimension mismatch");
    }
}

// Neumann end contributions (1D): a(x_b, y) * g * phi_i(x_b), phi_i(x_b) = 1.
void add_neumann_terms(const ProblemSpec& problem, const Mesh& mesh,
                       std::span<const double> y_ref, std::vector<double>& rhs) {
    for (std::size_t node : mesh.neumann_nodes()) {
        const int dof = mesh.dof_of(node);
        if (dof < 0) continue;
        const auto x = mesh.node(node);
        const double g = (x[0] == 0.0) ? problem.left.value : problem.right.value;
        rhs[static_cast<std::size_t>(dof)] += problem.coefficient_at(x, y_ref) * g;
    }
}

} // namespace

AssembledSystem assemble(const ProblemSpec& problem, const Mesh& mesh,
                         std::span<const double> y_ref) {
    check_parameter(problem, mesh, y_ref);
    const std::size_t m_h = mesh.free_dof_count();
    std::vector<Triplet> trips;
    std::vector<double> rhs(m_h, 0.0);

    if (mesh.dim() == 1) {
        trips.reserve(4 * mesh.element_count());
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto en = mesh.element(e);
            const double x0 = mesh.node(en[0])[0];
            const double x1 = mesh.node(en[1])[0];
            const double he = x1 - x0;
            double a_int = 0.0; // integral of a over the element
            std::array<double, 2> f_loc = {0.0, 0.0};
            for (std::size_t q = 0; q < kGaussX.size(); ++q) {
                const double xq = x0 + kGaussX[q] * he;
                const double w = kGaussW[q] * he;
                const double aq = problem.coefficient_at(std::span(&xq, 1), y_ref);
                if (!(aq > 0.0)) throw std::runtime_error("non-elliptic coefficient sample");
                a_int += w * aq;
                const double fq = problem.forcing_at(std::span(&xq, 1));
                f_loc[0] += w * fq * (1.0 - kGaussX[q]);
                f_loc[1] += w * fq * kGaussX[q];
            }
            const double k = a_int / (he * he); // a * phi_i' * phi_j', signs below
            const std::array<std::array<double, 2>, 2> k_loc = {{{k, -k}, {-k, k}}};
            for (int i = 0; i < 2; ++i) {
                const int di = mesh.dof_of(en[static_cast<std::size_t>(i)]);
                if (di < 0) continue;
                rhs[static_cast<std::size_t>(di)] += f_loc[static_cast<std::size_t>(i)];
                for (int j = 0; j < 2; ++j) {
                    const int dj = mesh.dof_of(en[static_cast<std::size_t>(j)]);
                    if (dj < 0) continue;
                    trips.push_back({static_cast<std::size_t>(di), static_cast<std::size_t>(dj),
                                     k_loc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
                }
            }
        }
    } else {
        trips.reserve(9 * mesh.element_count());
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto en = mesh.element(e);
            const auto p0 = mesh.node(en[0]);
            const auto p1 = mesh.node(en[1]);
            const auto p2 = mesh.node(en[2]);
            const double det =
                (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            const double area = 0.5 * std::abs(det);
            // Constant P1 gradients.
            const std::array<std::array<double, 2>, 3> grad = {{
                {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det},
                {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det},
                {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det},
            }};
            // Mid-edge quadrature, degree-2 exact; phi values at the three
            // quadrature points are 1/2 on adjacent vertices.
            const std::array<std::array<double, 2>, 3> qp = {{
                {0.5 * (p0[0] + p1[0]), 0.5 * (p0[1] + p1[1])},
                {0.5 * (p1[0] + p2[0]), 0.5 * (p1[1] + p2[1])},
                {0.5 * (p2[0] + p0[0]), 0.5 * (p2[1] + p0[1])},
            }};
            const std::array<std::array<double, 3>, 3> phi_at_qp = {{
                {0.5, 0.5, 0.0},
                {0.0, 0.5, 0.5},
                {0.5, 0.0, 0.5},
            }};
            double a_int = 0.0;
            std::array<double, 3> f_loc = {0.0, 0.0, 0.0};
            for (int q = 0; q < 3; ++q) {
                const double w = area / 3.0;
                const double aq = problem.coefficient_at(qp[static_cast<std::size_t>(q)], y_ref);
                if (!(aq > 0.0)) throw std::runtime_error("non-elliptic coefficient sample");
                a_int += w * aq;
                const double fq = problem.forcing_at(qp[static_cast<std::size_t>(q)]);
                for (int i = 0; i < 3; ++i) {
                    f_loc[static_cast<std::size_t>(i)] +=
                        w * fq * phi_at_qp[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
                }
            }
            std::array<std::array<double, 3>, 3> k_loc{};
            for (int i = 0; i < 3; ++i) {
                for (int j = i; j < 3; ++j) {
                    const double gij = grad[static_cast<std::size_t>(i)][0] *
                                           grad[static_cast<std::size_t>(j)][0] +
                                       grad[static_cast<std::size_t>(i)][1] *
                                           grad[static_cast<std::size_t>(j)][1];
                    const double v = a_int * gij;
                    k_loc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                    k_loc[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
                }
            }
            for (int i = 0; i < 3; ++i) {
                const int di = mesh.dof_of(en[static_cast<std::size_t>(i)]);
                if (di < 0) continue;
                rhs[static_cast<std::size_t>(di)] += f_loc[static_cast<std::size_t>(i)];
                for (int j = 0; j < 3; ++j) {
                    const int dj = mesh.dof_of(en[static_cast<std::size_t>(j)]);
                    if (dj < 0) continue;
                    trips.push_back({static_cast<std::size_t>(di), static_cast<std::size_t>(dj),
                                     k_loc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
                }
            }
        }
    }

    AssembledSystem sys;
    sys.matrix = CsrMatrix::from_triplets(m_h, std::move(trips));
    sys.rhs = std::move(rhs);
    add_neumann_terms(problem, mesh, y_ref, sys.rhs);
    sys.parameter.assign(y_ref.begin(), y_ref.end());
    return sys;
}

std::vector<double> nonlinear_residual(const ProblemSpec& problem, const Mesh& mesh,
                                       std::span<const double> y_ref,
                                       std::span<const double> coeffs) {
    check_parameter(problem, mesh, y_ref);
    if (problem.nonlinearity == Nonlinearity::none) {
        throw std::invalid_argument("nonlinear residual needs a nonlinear problem");
    }
    if (mesh.dim() != 1) throw std::invalid_argument("nonlinear problems are 1D");
    const std::size_t m_h = mesh.free_dof_count();
    if (coeffs.size() != m_h) throw std::invalid_argument("coefficient size mismatch");

    std::vector<double> r(m_h, 0.0);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto en = mesh.element(e);
        const double x0 = mesh.node(en[0])[0];
        const double he = mesh.node(en[1])[0] - x0;
        const int d0 = mesh.dof_of(en[0]);
        const int d1 = mesh.dof_of(en[1]);
        const double c0 = d0 < 0 ? 0.0 : coeffs[static_cast<std::size_t>(d0)];
        const double c1 = d1 < 0 ? 0.0 : coeffs[static_cast<std::size_t>(d1)];
        const double du = (c1 - c0) / he;
        for (std::size_t q = 0; q < kGaussX.size(); ++q) {
            const double t = kGaussX[q];
            const double xq = x0 + t * he;
            const double w = kGaussW[q] * he;
            const double aq = problem.coefficient_at(std::span(&xq, 1), y_ref);
            const double u = c0 * (1.0 - t) + c1 * t;
            const double fq = problem.forcing_at(std::span(&xq, 1));
            const double fu = nonlinear_term(problem.nonlinearity, u, du);
            // test functions: phi0' = -1/he, phi1' = +1/he
            if (d0 >= 0) {
                r[static_cast<std::size_t>(d0)] +=
                    w * ((fq - fu) * (1.0 - t) + aq * du / he);
            }
            if (d1 >= 0) {
                r[static_cast<std::size_t>(d1)] += w * ((fq - fu) * t - aq * du / he);
            }
        }
    }
    add_neumann_terms(problem, mesh, y_ref, r);
    return r;
}

CsrMatrix tangent_matrix(const ProblemSpec& problem, const Mesh& mesh,
                         std::span<const double> y_ref, std::span<const double> coeffs) {
    check_parameter(problem, mesh, y_ref);
    if (problem.nonlinearity == Nonlinearity::none) {
        throw std::invalid_argument("tangent needs a nonlinear problem");
    }
    if (mesh.dim() != 1) throw std::invalid_argument("nonlinear problems are 1D");
    const std::size_t m_h = mesh.free_dof_count();
    if (coeffs.size() != m_h) throw std::invalid_argument("coefficient size mismatch");

    std::vector<Triplet> trips;
    trips.reserve(4 * mesh.element_count());
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto en = mesh.element(e);
        const double x0 = mesh.node(en[0])[0];
        const double he = mesh.node(en[1])[0] - x0;
        const int dof[2] = {mesh.dof_of(en[0]), mesh.dof_of(en[1])};
        const double c0 = dof[0] < 0 ? 0.0 : coeffs[static_cast<std::size_t>(dof[0])];
        const double c1 = dof[1] < 0 ? 0.0 : coeffs[static_cast<std::size_t>(dof[1])];
        const double du = (c1 - c0) / he;
        std::array<std::array<double, 2>, 2> k_loc{};
        for (std::size_t q = 0; q < kGaussX.size(); ++q) {
            const double t = kGaussX[q];
            const double xq = x0 + t * he;
            const double w = kGaussW[q] * he;
            const double aq = problem.coefficient_at(std::span(&xq, 1), y_ref);
            const double u = c0 * (1.0 - t) + c1 * t;
            const double phi[2] = {1.0 - t, t};
            const double dphi[2] = {-1.0 / he, 1.0 / he};
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    double v = aq * dphi[i] * dphi[j]; // stiffness part
                    switch (problem.nonlinearity) {
                    case Nonlinearity::power_five:
                        v += 5.0 * u * u * u * u * phi[j] * phi[i];
                        break;
                    case Nonlinearity::u_times_du:
                        v += (phi[j] * du + u * dphi[j]) * phi[i];
                        break;
                    case Nonlinearity::none:
                        break;
                    }
                    k_loc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += w * v;
                }
            }
        }
        for (int i = 0; i < 2; ++i) {
            if (dof[i] < 0) continue;
            for (int j = 0; j < 2; ++j) {
                if (dof[j] < 0) continue;
                trips.push_back({static_cast<std::size_t>(dof[i]),
                                 static_cast<std::size_t>(dof[j]),
                                 k_loc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
            }
        }
    }
    return CsrMatrix::from_triplets(m_h, std::move(trips));
}

CsrMatrix assemble_mass(const Mesh& mesh) {
    const std::size_t m_h = mesh.free_dof_count();
    std::vector<Triplet> trips;
    if (mesh.dim() == 1) {
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto en = mesh.element(e);
            const double he = mesh.node(en[1])[0] - mesh.node(en[0])[0];
            const double m_diag = he / 3.0;
            const double m_off = he / 6.0;
            const int d0 = mesh.dof_of(en[0]);
            const int d1 = mesh.dof_of(en[1]);
            if (d0 >= 0) trips.push_back({static_cast<std::size_t>(d0), static_cast<std::size_t>(d0), m_diag});
            if (d1 >= 0) trips.push_back({static_cast<std::size_t>(d1), static_cast<std::size_t>(d1), m_diag});
            if (d0 >= 0 && d1 >= 0) {
                trips.push_back({static_cast<std::size_t>(d0), static_cast<std::size_t>(d1), m_off});
                trips.push_back({static_cast<std::size_t>(d1), static_cast<std::size_t>(d0), m_off});
            }
        }
    } else {
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto en = mesh.element(e);
            const auto p0 = mesh.node(en[0]);
            const auto p1 = mesh.node(en[1]);
            const auto p2 = mesh.node(en[2]);
            const double det =
                (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            const double area = 0.5 * std::abs(det);
            for (int i = 0; i < 3; ++i) {
                const int di = mesh.dof_of(en[static_cast<std::size_t>(i)]);
                if (di < 0) continue;
                for (int j = 0; j < 3; ++j) {
                    const int dj = mesh.dof_of(en[static_cast<std::size_t>(j)]);
                    if (dj < 0) continue;
                    const double v = (i == j) ? area / 6.0 : area / 12.0;
                    trips.push_back({static_cast<std::size_t>(di), static_cast<std::size_t>(dj), v});
                }
            }
        }
    }
    return CsrMatrix::from_triplets(m_h, std::move(trips));
}

double l2_norm(const CsrMatrix& mass, std::span<const double> coeffs) {
    return a_norm(mass, coeffs);
}

double estimate_condition(const CsrMatrix& matrix, double rel_tol) {
    const std::size_t n = matrix.rows();
    if (n == 0) throw std::invalid_argument("empty matrix");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    auto rayleigh = [&](std::span<const double> v) {
        return dot(v, matrix.multiply(v)) / dot(v, v);
    };
    auto normalize = [&](std::vector<double>& v) {
        const double nv = norm2(v);
        if (!(nv > 0.0)) throw std::runtime_error("condition estimate: zero iterate");
        for (double& c : v) c /= nv;
    };

    // Power iteration for lambda_max.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + std::sin(static_cast<double>(i) + 1.0);
    normalize(v);
    double lambda_max = rayleigh(v);
    for (int it = 0; it < 20000; ++it) {
        v = matrix.multiply(v);
        normalize(v);
        const double next = rayleigh(v);
        const bool done = std::abs(next - lambda_max) <= rel_tol * std::abs(next) && it >= 2;
        lambda_max = next;
        if (done) break;
    }

    // Inverse power iteration for lambda_min; inner solves by plain CG.
    auto inner_solve = [&](const std::vector<double>& b, std::vector<double>& x) {
        std::vector<double> r(b);
        std::vector<double> ax = matrix.multiply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
        std::vector<double> p(r);
        double rho = dot(r, r);
        const double target = 1e-20 * dot(b, b);
        for (std::size_t it = 0; it < 4 * n + 100; ++it) {
            if (rho <= target) break;
            const std::vector<double> q = matrix.multiply(p);
            const double alpha = rho / dot(p, q);
            axpy(alpha, p, x);
            axpy(-alpha, q, r);
            const double rho_new = dot(r, r);
            const double beta = rho_new / rho;
            rho = rho_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        }
    };

    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 + std::cos(static_cast<double>(i) + 1.0);
    normalize(w);
    double lambda_min = rayleigh(w);
    std::vector<double> sol(n, 0.0);
    for (int it = 0; it < 2000; ++it) {
        inner_solve(w, sol);
        w = sol;
        normalize(w);
        const double next = rayleigh(w);
        const bool done = std::abs(next - lambda_min) <= rel_tol * std::abs(next) && it >= 2;
        lambda_min = next;
        if (done) break;
    }

    if (!(lambda_min > 0.0)) throw std::runtime_error("condition estimate: nonpositive eigenvalue");
    return lambda_max / lambda_min;
}

} // namespace scaccel
