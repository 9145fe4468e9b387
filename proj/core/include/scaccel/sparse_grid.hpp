#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace scaccel {

/// Multi-index of 1D resolution levels, one entry per parameter dimension.
/// Every component is >= 1; the all-ones index is the coarsest.
using MultiIndex = std::vector<int>;

/// Per-dimension anisotropy weights for the Smolyak level condition.
/// A dimension with a larger weight is refined later (fewer points).
class AnisotropyWeights {
public:
    explicit AnisotropyWeights(std::vector<double> alpha);
    static AnisotropyWeights isotropic(int n_dims);

    int dims() const { return static_cast<int>(alpha_.size()); }
    double operator[](int n) const { return alpha_[static_cast<std::size_t>(n)]; }
    double min_alpha() const { return alpha_min_; }
    bool is_isotropic() const;
    const std::vector<double>& values() const { return alpha_; }

private:
    std::vector<double> alpha_;
    double alpha_min_;
};

/// Number of 1D nodes at resolution level l: 1, 3, 5, 9, 17, ... (doubling rule).
int level_node_count(int level);

/// Left inverse of the node-count rule: smallest level whose rule has at
/// least `points` nodes.
int min_level_for_points(int points);

/// Weighted Smolyak level of a multi-index: sum of (alpha_n/alpha_min)*(l_n-1).
/// Zero exactly for the all-ones index.
double smolyak_level(const MultiIndex& index, const AnisotropyWeights& alpha);

/// Clenshaw-Curtis nodes of the given level on [-1,1], strictly increasing.
/// Level 1 is the singleton {0}; level l >= 2 has 2^(l-1)+1 Chebyshev extrema.
/// Values are canonical: computed once per (level, position), exactly
/// antisymmetric, with exact 0 and +-1 entries, so that nested levels share
/// bitwise-identical coordinates.
const std::vector<double>& clenshaw_curtis_nodes(int level);

/// Quadrature weights paired with clenshaw_curtis_nodes(level) integrating
/// against the uniform density 1/2 on [-1,1]; they sum to 1.
const std::vector<double>& clenshaw_curtis_weights(int level);

/// All multi-indices with smolyak_level(l) <= level. The set is downward
/// closed (admissible), sorted lexicographically.
std::vector<MultiIndex> admissible_indices(int level, int n_dims,
                                           const AnisotropyWeights& alpha);

struct GridPoint {
    std::vector<double> coords;  // in [-1,1]^N, canonical node values
    int birth_level = 0;         // smallest w such that the point is in H_w
    std::size_t id = 0;          // position in the grid's point list
};

/// Nested collocation point set H_W on [-1,1]^N with per-point birth levels.
/// Points are ordered by (birth level, lexicographic coordinates) and ids are
/// contiguous, so the first count_at(w) points reproduce H_w exactly.
class CollocationGrid {
public:
    int dims() const { return n_dims_; }
    int max_level() const { return max_level_; }
    const AnisotropyWeights& weights() const { return alpha_; }

    std::size_t size() const { return points_.size(); }           // M_W
    std::size_t count_at(int level) const;                        // M_w
    std::size_t new_count_at(int level) const;                    // delta M_w
    const GridPoint& point(std::size_t id) const { return points_[id]; }
    const std::vector<GridPoint>& points() const { return points_; }

    /// Exact (bitwise) coordinate lookup; nodes must be canonical values.
    std::optional<std::size_t> find(std::span<const double> coords) const;

    /// Flat text table: one row per point (id, birth level, coordinates in
    /// full precision), preceded by '#' header lines carrying the grid spec.
    void dump(std::ostream& out) const;
    static CollocationGrid load(std::istream& in);

    friend CollocationGrid build_grid(int, int, const AnisotropyWeights&, std::size_t);

private:
    CollocationGrid() : alpha_(std::vector<double>{1.0}) {}

    int n_dims_ = 1;
    int max_level_ = 0;
    AnisotropyWeights alpha_;
    std::vector<GridPoint> points_;
    std::vector<std::size_t> count_at_level_; // cumulative M_w, w = 0..W
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> lookup_;

    void build_lookup();
};

inline constexpr std::size_t kDefaultGridPointCap = 10'000'000;

/// Builds the nested grid H_0 .. H_max_level. Throws std::length_error if the
/// point count would exceed `point_cap`.
CollocationGrid build_grid(int max_level, int n_dims, const AnisotropyWeights& alpha,
                           std::size_t point_cap = kDefaultGridPointCap);

} // namespace scaccel
