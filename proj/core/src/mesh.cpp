#include "scaccel/mesh.hpp"

#include <stdexcept>

namespace scaccel {

Mesh Mesh::interval(int cells, bool left_dirichlet, bool right_dirichlet) {
    if (cells < 2) throw std::invalid_argument("interval mesh needs at least 2 cells");
    Mesh m;
    m.dim_ = 1;
    m.h_ = 1.0 / cells;
    const std::size_t n = static_cast<std::size_t>(cells) + 1;
    m.nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.nodes_[i] = static_cast<double>(i) * m.h_;
    m.nodes_.back() = 1.0;
    m.elements_.reserve(2 * static_cast<std::size_t>(cells));
    for (std::size_t e = 0; e + 1 < n; ++e) {
        m.elements_.push_back(e);
        m.elements_.push_back(e + 1);
    }
    m.dof_.assign(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool eliminated =
            (i == 0 && left_dirichlet) || (i == n - 1 && right_dirichlet);
        if (!eliminated) m.dof_[i] = next++;
    }
    m.free_dofs_ = static_cast<std::size_t>(next);
    if (!left_dirichlet) m.neumann_nodes_.push_back(0);
    if (!right_dirichlet) m.neumann_nodes_.push_back(n - 1);
    return m;
}

Mesh Mesh::unit_square(int cells_per_side) {
    if (cells_per_side < 2) throw std::invalid_argument("square mesh needs at least 2 cells per side");
    Mesh m;
    m.dim_ = 2;
    m.h_ = 1.0 / cells_per_side;
    const std::size_t k = static_cast<std::size_t>(cells_per_side);
    const std::size_t side = k + 1;
    m.nodes_.resize(side * side * 2);
    for (std::size_t j = 0; j < side; ++j) {
        for (std::size_t i = 0; i < side; ++i) {
            const std::size_t id = j * side + i;
            m.nodes_[2 * id] = static_cast<double>(i) * m.h_;
            m.nodes_[2 * id + 1] = static_cast<double>(j) * m.h_;
        }
    }
    m.elements_.reserve(6 * k * k);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t p00 = j * side + i;
            const std::size_t p10 = p00 + 1;
            const std::size_t p01 = p00 + side;
            const std::size_t p11 = p01 + 1;
            m.elements_.insert(m.elements_.end(), {p00, p10, p11});
            m.elements_.insert(m.elements_.end(), {p00, p11, p01});
        }
    }
    m.dof_.assign(side * side, -1);
    int next = 0;
    for (std::size_t j = 1; j < k; ++j) {
        for (std::size_t i = 1; i < k; ++i) {
            m.dof_[j * side + i] = next++;
        }
    }
    m.free_dofs_ = static_cast<std::size_t>(next);
    return m;
}

} // namespace scaccel
