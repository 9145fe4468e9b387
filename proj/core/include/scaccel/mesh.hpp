#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scaccel {

/// Uniform simplex mesh of the unit interval or unit square. 2D meshes split
/// each grid cell into two right triangles along the (0,0)-(1,1) diagonal.
/// Dirichlet nodes are eliminated from the dof numbering; free dofs keep the
/// node order.
class Mesh {
public:
    static Mesh interval(int cells, bool left_dirichlet, bool right_dirichlet);
    static Mesh unit_square(int cells_per_side); // homogeneous Dirichlet boundary

    int dim() const { return dim_; }
    double h() const { return h_; }
    std::size_t node_count() const { return nodes_.size() / static_cast<std::size_t>(dim_); }
    std::size_t free_dof_count() const { return free_dofs_; } // M_h

    std::span<const double> node(std::size_t i) const {
        return {nodes_.data() + i * static_cast<std::size_t>(dim_),
                static_cast<std::size_t>(dim_)};
    }
    /// Free-dof index of a node, or -1 for an eliminated Dirichlet node.
    int dof_of(std::size_t node) const { return dof_[node]; }

    std::size_t element_count() const {
        return elements_.size() / static_cast<std::size_t>(dim_ + 1);
    }
    std::span<const std::size_t> element(std::size_t e) const {
        return {elements_.data() + e * static_cast<std::size_t>(dim_ + 1),
                static_cast<std::size_t>(dim_ + 1)};
    }

    /// 1D only: nodes carrying a Neumann end condition (at most two).
    std::span<const std::size_t> neumann_nodes() const { return neumann_nodes_; }

private:
    int dim_ = 1;
    double h_ = 1.0;
    std::size_t free_dofs_ = 0;
    std::vector<double> nodes_;        // node_count * dim
    std::vector<std::size_t> elements_; // element_count * (dim+1)
    std::vector<int> dof_;
    std::vector<std::size_t> neumann_nodes_;
};

} // namespace scaccel
