#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "scaccel/sparse_grid.hpp"

namespace scaccel {

struct PointWeight {
    std::size_t id;
    double weight;
};

/// Lagrange basis values Psi_j(y) of the sparse-grid interpolant over H_level,
/// one entry per point of H_level in id order, accumulated through the
/// telescoped tensor (inclusion-exclusion) form of the Smolyak operator.
std::vector<PointWeight> sparse_basis_weights(const CollocationGrid& grid, int level,
                                              std::span<const double> y);

/// Integration rule against the uniform density 2^-N on [-1,1]^N, supported
/// on H_level. Weights sum to 1.
struct QuadratureRule {
    std::vector<PointWeight> weights;
    double weight_sum;
};

QuadratureRule make_quadrature(const CollocationGrid& grid, int level);

/// Immutable snapshot interpolant mapping parameter points in [-1,1]^N to
/// vectors of length value_dim (FE coefficient vectors). Data is indexed by
/// grid point id and must cover H_level exactly.
class VectorValuedInterpolant {
public:
    VectorValuedInterpolant(std::shared_ptr<const CollocationGrid> grid, int level,
                            std::vector<std::vector<double>> data);

    int level() const { return level_; }
    std::size_t support_size() const { return data_.size(); } // M_level
    std::size_t value_dim() const { return value_dim_; }
    const CollocationGrid& grid() const { return *grid_; }
    std::shared_ptr<const CollocationGrid> grid_ptr() const { return grid_; }
    const std::vector<double>& data_at(std::size_t id) const { return data_[id]; }

    /// Smolyak combination of the stored vectors at y; equals the unique
    /// Lagrange interpolant through the data.
    std::vector<double> evaluate(std::span<const double> y) const;

    /// Expectation of the interpolant against the uniform density.
    std::vector<double> expectation() const;

private:
    std::shared_ptr<const CollocationGrid> grid_;
    int level_;
    std::size_t value_dim_;
    std::vector<std::vector<double>> data_;
};

/// Sampled lower bound on the Lebesgue constant of the level-`level` operator:
/// max over `samples` low-discrepancy points of sum_j |Psi_j(y)|.
double lebesgue_estimate(const CollocationGrid& grid, int level,
                         std::size_t samples = 100'000);

} // namespace scaccel
