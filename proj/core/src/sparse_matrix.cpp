#include "scaccel/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace scaccel {

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.row_offsets_.assign(n + 1, 0);
    std::size_t k = 0;
    while (k < entries.size()) {
        if (entries[k].row >= n || entries[k].col >= n) {
            throw std::invalid_argument("triplet index out of range");
        }
        double v = entries[k].value;
        std::size_t j = k + 1;
        while (j < entries.size() && entries[j].row == entries[k].row &&
               entries[j].col == entries[k].col) {
            v += entries[j].value;
            ++j;
        }
        m.col_indices_.push_back(entries[k].col);
        m.values_.push_back(v);
        ++m.row_offsets_[entries[k].row + 1];
        k = j;
    }
    for (std::size_t i = 0; i < n; ++i) m.row_offsets_[i + 1] += m.row_offsets_[i];
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = rows();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("matvec size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            s += values_[k] * x[col_indices_[k]];
        }
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(rows());
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(rows(), 0.0);
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            if (col_indices_[k] == i) d[i] = values_[k];
        }
    }
    return d;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        if (col_indices_[k] == j) return values_[k];
    }
    return 0.0;
}

CsrMatrix CsrMatrix::transpose() const {
    const std::size_t n = rows();
    CsrMatrix t;
    t.row_offsets_.assign(n + 1, 0);
    for (std::size_t c : col_indices_) ++t.row_offsets_[c + 1];
    for (std::size_t i = 0; i < n; ++i) t.row_offsets_[i + 1] += t.row_offsets_[i];
    t.col_indices_.resize(nnz());
    t.values_.resize(nnz());
    std::vector<std::size_t> next(t.row_offsets_.begin(), t.row_offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            const std::size_t pos = next[col_indices_[k]]++;
            t.col_indices_[pos] = i;
            t.values_[pos] = values_[k];
        }
    }
    return t;
}

void CsrMatrix::dump_coordinate(std::ostream& out) const {
    char buf[64];
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            std::snprintf(buf, sizeof(buf), "%zu %zu %.17g\n", i, col_indices_[k], values_[k]);
            out << buf;
        }
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double a_norm(const CsrMatrix& a, std::span<const double> x) {
    return std::sqrt(std::max(0.0, dot(x, a.multiply(x))));
}

} // namespace scaccel
