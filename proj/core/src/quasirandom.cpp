#include "scaccel/quasirandom.hpp"

#include <stdexcept>

namespace scaccel {

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d) {
        if (p % d == 0) return false;
    }
    return true;
}

double radical_inverse(std::size_t n, int base) {
    double inv = 1.0 / base;
    double f = inv;
    double v = 0.0;
    while (n > 0) {
        v += f * static_cast<double>(n % static_cast<std::size_t>(base));
        n /= static_cast<std::size_t>(base);
        f *= inv;
    }
    return v;
}

} // namespace

HaltonSequence::HaltonSequence(int dims, std::size_t start_index) : index_(start_index) {
    if (dims < 1) throw std::invalid_argument("Halton sequence needs dims >= 1");
    int p = 2;
    while (static_cast<int>(bases_.size()) < dims) {
        if (is_prime(p)) bases_.push_back(p);
        ++p;
    }
}

std::vector<double> HaltonSequence::next() {
    std::vector<double> x(bases_.size());
    for (std::size_t d = 0; d < bases_.size(); ++d) {
        x[d] = 2.0 * radical_inverse(index_, bases_[d]) - 1.0;
    }
    ++index_;
    return x;
}

} // namespace scaccel
