#include "scaccel/interpolant.hpp"

#include <cmath>
#include <stdexcept>

#include "scaccel/quasirandom.hpp"

namespace scaccel {

namespace {

// Values of the m(level) Lagrange cardinal functions at y, barycentric form.
// Exact node hits short-circuit to a unit vector.
void cc_basis_values(int level, double y, std::vector<double>& out) {
    const auto& nodes = clenshaw_curtis_nodes(level);
    const std::size_t m = nodes.size();
    out.assign(m, 0.0);
    if (m == 1) {
        out[0] = 1.0;
        return;
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double d = y - nodes[j];
        if (d == 0.0) {
            out.assign(m, 0.0);
            out[j] = 1.0;
            return;
        }
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == m - 1) w *= 0.5;
        out[j] = w / d;
        denom += out[j];
    }
    for (std::size_t j = 0; j < m; ++j) out[j] /= denom;
}

// Accumulates per-point scalar weights of the Smolyak operator over H_level.
// factors(dim, level1d) supplies the per-node 1D factors of each tensor term:
// Lagrange values for evaluation, quadrature weights for integration.
template <typename Factors>
std::vector<double> accumulate_weights(const CollocationGrid& grid, int level,
                                       Factors&& factors) {
    if (level < 0 || level > grid.max_level()) {
        throw std::invalid_argument("interpolation level out of grid range");
    }
    const int n_dims = grid.dims();
    const std::size_t support = grid.count_at(level);
    std::vector<double> acc(support, 0.0);

    std::vector<double> coords(static_cast<std::size_t>(n_dims));
    for (const MultiIndex& index : admissible_indices(level, n_dims, grid.weights())) {
        // i ranges over {0,1}^N; components with l_n = 1 stay 0 because the
        // difference operator vanishes there (the level-0 operator is zero).
        std::vector<int> active;
        for (int n = 0; n < n_dims; ++n) {
            if (index[static_cast<std::size_t>(n)] > 1) active.push_back(n);
        }
        const std::size_t n_subsets = std::size_t{1} << active.size();
        for (std::size_t mask = 0; mask < n_subsets; ++mask) {
            MultiIndex sub = index;
            int parity = 0;
            for (std::size_t b = 0; b < active.size(); ++b) {
                if (mask & (std::size_t{1} << b)) {
                    --sub[static_cast<std::size_t>(active[b])];
                    ++parity;
                }
            }
            const double sign = (parity % 2 == 0) ? 1.0 : -1.0;

            std::vector<std::span<const double>> f(static_cast<std::size_t>(n_dims));
            for (int n = 0; n < n_dims; ++n) {
                f[static_cast<std::size_t>(n)] = factors(n, sub[static_cast<std::size_t>(n)]);
            }
            std::vector<std::size_t> odo(static_cast<std::size_t>(n_dims), 0);
            while (true) {
                double w = sign;
                for (int n = 0; n < n_dims; ++n) {
                    const auto& nodes = clenshaw_curtis_nodes(sub[static_cast<std::size_t>(n)]);
                    coords[static_cast<std::size_t>(n)] = nodes[odo[static_cast<std::size_t>(n)]];
                    w *= f[static_cast<std::size_t>(n)][odo[static_cast<std::size_t>(n)]];
                }
                auto id = grid.find(coords);
                if (!id || *id >= support) {
                    throw std::logic_error("tensor node missing from grid support");
                }
                acc[*id] += w;
                int n = n_dims - 1;
                while (n >= 0 && ++odo[static_cast<std::size_t>(n)] ==
                                     f[static_cast<std::size_t>(n)].size()) {
                    odo[static_cast<std::size_t>(n)] = 0;
                    --n;
                }
                if (n < 0) break;
            }
        }
    }
    return acc;
}

void check_in_cube(const CollocationGrid& grid, std::span<const double> y) {
    if (static_cast<int>(y.size()) != grid.dims()) {
        throw std::invalid_argument("evaluation point has wrong dimension");
    }
    for (double c : y) {
        if (!(c >= -1.0 && c <= 1.0)) {
            throw std::domain_error("evaluation point outside [-1,1]^N");
        }
    }
}

} // namespace

std::vector<PointWeight> sparse_basis_weights(const CollocationGrid& grid, int level,
                                              std::span<const double> y) {
    check_in_cube(grid, y);

    const int max_1d = level + 1; // isotropic worst case; lazily filled below
    std::vector<std::vector<std::vector<double>>> cache(
        static_cast<std::size_t>(grid.dims()));
    for (auto& c : cache) c.resize(static_cast<std::size_t>(max_1d));

    auto factors = [&](int dim, int lvl) -> std::span<const double> {
        auto& slot = cache[static_cast<std::size_t>(dim)][static_cast<std::size_t>(lvl - 1)];
        if (slot.empty()) cc_basis_values(lvl, y[static_cast<std::size_t>(dim)], slot);
        return slot;
    };

    std::vector<double> acc = accumulate_weights(grid, level, factors);
    std::vector<PointWeight> out(acc.size());
    for (std::size_t id = 0; id < acc.size(); ++id) out[id] = {id, acc[id]};
    return out;
}

QuadratureRule make_quadrature(const CollocationGrid& grid, int level) {
    auto factors = [](int, int lvl) -> std::span<const double> {
        return clenshaw_curtis_weights(lvl);
    };
    std::vector<double> acc = accumulate_weights(grid, level, factors);
    QuadratureRule rule;
    rule.weights.resize(acc.size());
    rule.weight_sum = 0.0;
    for (std::size_t id = 0; id < acc.size(); ++id) {
        rule.weights[id] = {id, acc[id]};
        rule.weight_sum += acc[id];
    }
    if (std::abs(rule.weight_sum - 1.0) > 1e-12) {
        throw std::runtime_error("quadrature weights do not sum to 1");
    }
    return rule;
}

VectorValuedInterpolant::VectorValuedInterpolant(
    std::shared_ptr<const CollocationGrid> grid, int level,
    std::vector<std::vector<double>> data)
    : grid_(std::move(grid)), level_(level), data_(std::move(data)) {
    if (!grid_) throw std::invalid_argument("interpolant needs a grid");
    if (level_ < 0 || level_ > grid_->max_level()) {
        throw std::invalid_argument("interpolation level out of grid range");
    }
    if (data_.size() != grid_->count_at(level_)) {
        throw std::invalid_argument("interpolant data does not cover the grid support");
    }
    value_dim_ = data_.front().size();
    if (value_dim_ == 0) throw std::invalid_argument("interpolant data vectors are empty");
    for (const auto& v : data_) {
        if (v.size() != value_dim_) {
            throw std::invalid_argument("interpolant data vectors have mixed lengths");
        }
    }
}

std::vector<double> VectorValuedInterpolant::evaluate(std::span<const double> y) const {
    const auto weights = sparse_basis_weights(*grid_, level_, y);
    std::vector<double> out(value_dim_, 0.0);
    for (const auto& [id, w] : weights) {
        const auto& v = data_[id];
        for (std::size_t k = 0; k < value_dim_; ++k) out[k] += w * v[k];
    }
    return out;
}

std::vector<double> VectorValuedInterpolant::expectation() const {
    const auto rule = make_quadrature(*grid_, level_);
    std::vector<double> out(value_dim_, 0.0);
    for (const auto& [id, w] : rule.weights) {
        const auto& v = data_[id];
        for (std::size_t k = 0; k < value_dim_; ++k) out[k] += w * v[k];
    }
    return out;
}

double lebesgue_estimate(const CollocationGrid& grid, int level, std::size_t samples) {
    if (samples < 1) throw std::domain_error("sample count must be >= 1");
    HaltonSequence seq(grid.dims());
    double best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto y = seq.next();
        double sum = 0.0;
        for (const auto& [id, w] : sparse_basis_weights(grid, level, y)) {
            sum += std::abs(w);
        }
        best = std::max(best, sum);
    }
    return best;
}

} // namespace scaccel
