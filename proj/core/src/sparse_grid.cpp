#include "scaccel/sparse_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace scaccel {

namespace {

constexpr double kLevelTol = 1e-9; // guards real-valued level sums at integer cuts

std::uint64_t hash_coords(std::span<const double> coords) {
    std::uint64_t h = 1469598103934665603ull; // FNV-1a
    for (double c : coords) {
        auto bits = std::bit_cast<std::uint64_t>(c);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::vector<double> make_cc_nodes(int level) {
    if (level == 1) return {0.0};
    const int m = level_node_count(level);
    const int n = m - 1;
    std::vector<double> y(static_cast<std::size_t>(m));
    for (int j = 0; j < m / 2; ++j) {
        y[static_cast<std::size_t>(j)] = -std::cos(M_PI * j / n);
    }
    y[static_cast<std::size_t>(m / 2)] = 0.0; // m is odd; keep the centre exact
    for (int j = m / 2 + 1; j < m; ++j) {
        y[static_cast<std::size_t>(j)] = -y[static_cast<std::size_t>(m - 1 - j)];
    }
    return y;
}

// Gauss-Legendre rule on [-1,1]; nodes by Newton iteration on P_k.
void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(k), 0.0);
    weights.assign(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < (k + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (k + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(k - 1 - i)] = x;
        nodes[static_cast<std::size_t>(i)] = -x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(k - 1 - i)] = w;
    }
    if (k % 2 == 1) nodes[static_cast<std::size_t>(k / 2)] = 0.0;
}

// Integrates every Lagrange cardinal function of the level's node set against
// the density 1/2 on [-1,1] via an exact-degree Gauss rule.
std::vector<double> make_cc_weights(int level) {
    const auto& nodes = clenshaw_curtis_nodes(level);
    const int m = static_cast<int>(nodes.size());
    if (m == 1) return {1.0};

    // Barycentric weights for Chebyshev extrema: alternating signs, halved ends.
    std::vector<double> bary(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == m - 1) w *= 0.5;
        bary[static_cast<std::size_t>(j)] = w;
    }

    std::vector<double> gx, gw;
    gauss_legendre(m / 2 + 2, gx, gw);

    std::vector<double> quad(static_cast<std::size_t>(m), 0.0);
    std::vector<double> card(static_cast<std::size_t>(m));
    for (std::size_t g = 0; g < gx.size(); ++g) {
        const double x = gx[g];
        double denom = 0.0;
        int hit = -1;
        for (int j = 0; j < m; ++j) {
            double d = x - nodes[static_cast<std::size_t>(j)];
            if (d == 0.0) {
                hit = j;
                break;
            }
            card[static_cast<std::size_t>(j)] = bary[static_cast<std::size_t>(j)] / d;
            denom += card[static_cast<std::size_t>(j)];
        }
        if (hit >= 0) {
            quad[static_cast<std::size_t>(hit)] += 0.5 * gw[g];
            continue;
        }
        for (int j = 0; j < m; ++j) {
            quad[static_cast<std::size_t>(j)] += 0.5 * gw[g] * card[static_cast<std::size_t>(j)] / denom;
        }
    }
    return quad;
}

// 1-based positions of nodes that are new at this level.
std::vector<int> new_node_positions(int level) {
    if (level == 1) return {1};
    if (level == 2) return {1, 3};
    std::vector<int> pos;
    const int m = level_node_count(level);
    for (int j = 2; j < m; j += 2) pos.push_back(j);
    return pos;
}

} // namespace

AnisotropyWeights::AnisotropyWeights(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.empty()) throw std::invalid_argument("anisotropy weights: empty vector");
    alpha_min_ = alpha_[0];
    for (double a : alpha_) {
        if (!(a > 0.0)) throw std::domain_error("anisotropy weights must be positive");
        alpha_min_ = std::min(alpha_min_, a);
    }
}

AnisotropyWeights AnisotropyWeights::isotropic(int n_dims) {
    if (n_dims < 1) throw std::domain_error("dimension must be positive");
    return AnisotropyWeights(std::vector<double>(static_cast<std::size_t>(n_dims), 1.0));
}

bool AnisotropyWeights::is_isotropic() const {
    return std::all_of(alpha_.begin(), alpha_.end(),
                       [&](double a) { return a == alpha_[0]; });
}

int level_node_count(int level) {
    if (level < 1) throw std::domain_error("node-count rule needs level >= 1");
    if (level == 1) return 1;
    return (1 << (level - 1)) + 1;
}

int min_level_for_points(int points) {
    if (points < 1) throw std::domain_error("point count must be positive");
    int level = 1;
    while (level_node_count(level) < points) ++level;
    return level;
}

double smolyak_level(const MultiIndex& index, const AnisotropyWeights& alpha) {
    if (static_cast<int>(index.size()) != alpha.dims()) {
        throw std::invalid_argument("multi-index / weight dimension mismatch");
    }
    double g = 0.0;
    for (int n = 0; n < alpha.dims(); ++n) {
        const int l = index[static_cast<std::size_t>(n)];
        if (l < 1) throw std::domain_error("multi-index components must be >= 1");
        g += alpha[n] / alpha.min_alpha() * (l - 1);
    }
    return g;
}

const std::vector<double>& clenshaw_curtis_nodes(int level) {
    if (level < 1) throw std::domain_error("Clenshaw-Curtis level must be >= 1");
    static std::mutex mu;
    static std::deque<std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(cache.size()) < level) {
        cache.push_back(make_cc_nodes(static_cast<int>(cache.size()) + 1));
    }
    return cache[static_cast<std::size_t>(level - 1)];
}

const std::vector<double>& clenshaw_curtis_weights(int level) {
    if (level < 1) throw std::domain_error("Clenshaw-Curtis level must be >= 1");
    static std::mutex mu;
    static std::deque<std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(cache.size()) < level) {
        cache.push_back(make_cc_weights(static_cast<int>(cache.size()) + 1));
    }
    return cache[static_cast<std::size_t>(level - 1)];
}

namespace {

void enumerate_indices(int level, int n_dims, const AnisotropyWeights& alpha, int dim,
                       double used, MultiIndex& current, std::vector<MultiIndex>& out) {
    if (dim == n_dims) {
        out.push_back(current);
        return;
    }
    const double ratio = alpha[dim] / alpha.min_alpha();
    for (int l = 1; ratio * (l - 1) + used <= level + kLevelTol; ++l) {
        current[static_cast<std::size_t>(dim)] = l;
        enumerate_indices(level, n_dims, alpha, dim + 1, used + ratio * (l - 1), current, out);
    }
}

} // namespace

std::vector<MultiIndex> admissible_indices(int level, int n_dims,
                                           const AnisotropyWeights& alpha) {
    if (level < 0) throw std::domain_error("grid level must be >= 0");
    if (alpha.dims() != n_dims) throw std::invalid_argument("weight dimension mismatch");
    std::vector<MultiIndex> out;
    MultiIndex current(static_cast<std::size_t>(n_dims), 1);
    enumerate_indices(level, n_dims, alpha, 0, 0.0, current, out);
    return out;
}

std::size_t CollocationGrid::count_at(int level) const {
    if (level < 0 || level > max_level_) throw std::invalid_argument("level out of range");
    return count_at_level_[static_cast<std::size_t>(level)];
}

std::size_t CollocationGrid::new_count_at(int level) const {
    if (level == 0) return count_at(0);
    return count_at(level) - count_at(level - 1);
}

std::optional<std::size_t> CollocationGrid::find(std::span<const double> coords) const {
    auto it = lookup_.find(hash_coords(coords));
    if (it == lookup_.end()) return std::nullopt;
    for (std::size_t id : it->second) {
        const auto& p = points_[id].coords;
        if (std::equal(p.begin(), p.end(), coords.begin(), coords.end())) return id;
    }
    return std::nullopt;
}

void CollocationGrid::build_lookup() {
    lookup_.clear();
    lookup_.reserve(points_.size());
    for (const auto& p : points_) {
        lookup_[hash_coords(p.coords)].push_back(p.id);
    }
}

CollocationGrid build_grid(int max_level, int n_dims, const AnisotropyWeights& alpha,
                           std::size_t point_cap) {
    if (max_level < 0) throw std::domain_error("grid level must be >= 0");
    if (n_dims < 1) throw std::domain_error("dimension must be positive");
    if (alpha.dims() != n_dims) throw std::invalid_argument("weight dimension mismatch");

    CollocationGrid grid;
    grid.n_dims_ = n_dims;
    grid.max_level_ = max_level;
    grid.alpha_ = alpha;

    // Each point is generated exactly once, from the componentwise-minimal
    // multi-index containing it (positions new at their own 1D level).
    for (const MultiIndex& index : admissible_indices(max_level, n_dims, alpha)) {
        const int birth = static_cast<int>(std::ceil(smolyak_level(index, alpha) - kLevelTol));
        std::vector<std::vector<int>> positions(static_cast<std::size_t>(n_dims));
        for (int n = 0; n < n_dims; ++n) {
            positions[static_cast<std::size_t>(n)] =
                new_node_positions(index[static_cast<std::size_t>(n)]);
        }
        std::vector<std::size_t> odo(static_cast<std::size_t>(n_dims), 0);
        while (true) {
            GridPoint p;
            p.coords.resize(static_cast<std::size_t>(n_dims));
            for (int n = 0; n < n_dims; ++n) {
                const auto& nodes = clenshaw_curtis_nodes(index[static_cast<std::size_t>(n)]);
                const int j = positions[static_cast<std::size_t>(n)][odo[static_cast<std::size_t>(n)]];
                p.coords[static_cast<std::size_t>(n)] = nodes[static_cast<std::size_t>(j - 1)];
            }
            p.birth_level = birth;
            grid.points_.push_back(std::move(p));
            if (grid.points_.size() > point_cap) {
                throw std::length_error("collocation grid exceeds configured point cap");
            }
            int n = n_dims - 1;
            while (n >= 0 && ++odo[static_cast<std::size_t>(n)] ==
                                 positions[static_cast<std::size_t>(n)].size()) {
                odo[static_cast<std::size_t>(n)] = 0;
                --n;
            }
            if (n < 0) break;
        }
    }

    std::sort(grid.points_.begin(), grid.points_.end(),
              [](const GridPoint& a, const GridPoint& b) {
                  if (a.birth_level != b.birth_level) return a.birth_level < b.birth_level;
                  return a.coords < b.coords;
              });
    for (std::size_t i = 0; i < grid.points_.size(); ++i) grid.points_[i].id = i;

    grid.count_at_level_.assign(static_cast<std::size_t>(max_level) + 1, 0);
    for (const auto& p : grid.points_) {
        ++grid.count_at_level_[static_cast<std::size_t>(p.birth_level)];
    }
    for (int w = 1; w <= max_level; ++w) {
        grid.count_at_level_[static_cast<std::size_t>(w)] +=
            grid.count_at_level_[static_cast<std::size_t>(w - 1)];
    }

    grid.build_lookup();
    return grid;
}

void CollocationGrid::dump(std::ostream& out) const {
    out << "# scaccel collocation grid\n";
    out << "# dims " << n_dims_ << "\n";
    out << "# max_level " << max_level_ << "\n";
    out << "# alpha";
    char buf[64];
    for (double a : alpha_.values()) {
        std::snprintf(buf, sizeof(buf), " %.17g", a);
        out << buf;
    }
    out << "\n# columns: id birth_level y_1..y_" << n_dims_ << "\n";
    for (const auto& p : points_) {
        out << p.id << ' ' << p.birth_level;
        for (double c : p.coords) {
            std::snprintf(buf, sizeof(buf), " %.17g", c);
            out << buf;
        }
        out << '\n';
    }
}

CollocationGrid CollocationGrid::load(std::istream& in) {
    CollocationGrid grid;
    int dims = 0, max_level = -1;
    std::vector<double> alpha;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "dims") {
                ls >> dims;
            } else if (key == "max_level") {
                ls >> max_level;
            } else if (key == "alpha") {
                double a;
                while (ls >> a) alpha.push_back(a);
            }
            continue;
        }
        GridPoint p;
        std::istringstream ls(line);
        if (!(ls >> p.id >> p.birth_level)) {
            throw std::runtime_error("grid load: malformed point row");
        }
        double c;
        while (ls >> c) p.coords.push_back(c);
        grid.points_.push_back(std::move(p));
    }
    if (dims < 1 || max_level < 0 || static_cast<int>(alpha.size()) != dims) {
        throw std::runtime_error("grid load: missing or inconsistent header");
    }
    grid.n_dims_ = dims;
    grid.max_level_ = max_level;
    grid.alpha_ = AnisotropyWeights(alpha);
    for (std::size_t i = 0; i < grid.points_.size(); ++i) {
        if (grid.points_[i].id != i ||
            static_cast<int>(grid.points_[i].coords.size()) != dims) {
            throw std::runtime_error("grid load: malformed point table");
        }
    }
    grid.count_at_level_.assign(static_cast<std::size_t>(max_level) + 1, 0);
    for (const auto& p : grid.points_) {
        if (p.birth_level < 0 || p.birth_level > max_level) {
            throw std::runtime_error("grid load: birth level out of range");
        }
        ++grid.count_at_level_[static_cast<std::size_t>(p.birth_level)];
    }
    for (int w = 1; w <= max_level; ++w) {
        grid.count_at_level_[static_cast<std::size_t>(w)] +=
            grid.count_at_level_[static_cast<std::size_t>(w - 1)];
    }
    grid.build_lookup();
    return grid;
}

} // namespace scaccel
