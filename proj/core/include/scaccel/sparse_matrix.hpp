#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace scaccel {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Square sparse matrix in compressed-row storage with sorted column indices.
class CsrMatrix {
public:
    CsrMatrix() = default;
    static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> entries);

    std::size_t rows() const { return row_offsets_.empty() ? 0 : row_offsets_.size() - 1; }
    std::size_t nnz() const { return values_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> diagonal() const;
    double at(std::size_t i, std::size_t j) const; // 0 when not stored

    std::span<const std::size_t> row_offsets() const { return row_offsets_; }
    std::span<const std::size_t> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values_mutable() { return values_; }

    CsrMatrix transpose() const;

    /// Coordinate text format (row col value per line), for debugging.
    void dump_coordinate(std::ostream& out) const;

private:
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y); // y += alpha x

/// sqrt(x' A x); the A-norm of a coefficient vector for SPD A.
double a_norm(const CsrMatrix& a, std::span<const double> x);

} // namespace scaccel
