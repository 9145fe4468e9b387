#pragma once

#include <cstddef>
#include <vector>

namespace scaccel {

/// Deterministic low-discrepancy point sequence (Halton, prime bases),
/// mapped to the symmetric cube [-1,1]^dims.
class HaltonSequence {
public:
    explicit HaltonSequence(int dims, std::size_t start_index = 1);

    std::vector<double> next();

private:
    std::vector<int> bases_;
    std::size_t index_;
};

} // namespace scaccel
