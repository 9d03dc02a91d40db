#pragma once

#include "nildyn/cloud.hpp"
#include "nildyn/systems/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace nildyn {

namespace detail {

inline void check_comparable(const PointCloud& a, const PointCloud& b) {
    if (a.arity() != b.arity()) throw DimensionMismatch("hausdorff: cloud arities differ");
    if (a.dim() != b.dim()) throw DimensionMismatch("hausdorff: cloud dimensions differ");
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: clouds must be nonempty");
}

inline double tuple_dist(const SystemHandle& sys, const PointCloud& a, std::size_t i, const PointCloud& b,
                         std::size_t j) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.arity(); ++k) d = std::max(d, sys.dist(a.component(i, k), b.component(j, k)));
    return d;
}

inline double torus_tuple_dist(std::span<const double> p, std::span<const double> q) {
    double d = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) d = std::max(d, circle_dist(p[k], q[k]));
    return d;
}

/// Uniform cell grid over [0,1)^D with wraparound, for L-infinity nearest
/// neighbours on a torus.
class TorusGrid {
public:
    TorusGrid(const PointCloud& cloud, std::size_t cells_per_axis) : cloud_(cloud), m_(cells_per_axis) {
        dim_ = cloud.dim() * cloud.arity();
        for (std::size_t i = 0; i < cloud.size(); ++i) cells_[key(cell_of(cloud.tuple(i)))].push_back(i);
    }

    double nearest(std::span<const double> q) const {
        const auto qc = cell_of(q);
        const double h = 1.0 / static_cast<double>(m_);
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::int64_t> c(dim_);
        for (std::size_t r = 0;; ++r) {
            const auto span = static_cast<std::int64_t>(std::min<std::size_t>(2 * r + 1, m_));
            std::vector<std::int64_t> off(dim_, 0);
            while (true) {
                std::size_t ring = 0;
                for (std::size_t k = 0; k < dim_; ++k) {
                    std::int64_t o = span == static_cast<std::int64_t>(m_) ? off[k] - qc[k] : off[k] - static_cast<std::int64_t>(r);
                    c[k] = wrap(qc[k] + o);
                    ring = std::max(ring, circ(c[k], qc[k]));
                }
                if (ring == r) {
                    if (auto it = cells_.find(key(c)); it != cells_.end())
                        for (auto i : it->second) best = std::min(best, torus_tuple_dist(q, cloud_.tuple(i)));
                }
                std::size_t pos = dim_;
                while (pos > 0 && off[pos - 1] == span - 1) off[--pos] = 0;
                if (pos == 0) break;
                ++off[pos - 1];
            }
            if (best <= static_cast<double>(r) * h || 2 * r + 1 >= m_) return best;
        }
    }

private:
    std::vector<std::int64_t> cell_of(std::span<const double> p) const {
        std::vector<std::int64_t> c(p.size());
        for (std::size_t k = 0; k < p.size(); ++k)
            c[k] = std::min<std::int64_t>(static_cast<std::int64_t>(p[k] * static_cast<double>(m_)),
                                          static_cast<std::int64_t>(m_) - 1);
        return c;
    }
    std::int64_t wrap(std::int64_t v) const {
        auto m = static_cast<std::int64_t>(m_);
        return ((v % m) + m) % m;
    }
    std::size_t circ(std::int64_t a, std::int64_t b) const {
        auto d = static_cast<std::size_t>(std::llabs(a - b));
        return std::min(d, m_ - d);
    }
    std::uint64_t key(const std::vector<std::int64_t>& c) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
        return h;
    }

    const PointCloud& cloud_;
    std::size_t m_;
    std::size_t dim_ = 0;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

inline std::size_t occupied_cells(const PointCloud& cloud, std::size_t m) {
    std::unordered_set<std::uint64_t> keys;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        std::uint64_t h = 1469598103934665603ULL;
        for (double v : cloud.tuple(i))
            h = (h ^ std::min<std::uint64_t>(static_cast<std::uint64_t>(v * static_cast<double>(m)), m - 1)) * 1099511628211ULL;
        keys.insert(h);
    }
    return keys.size();
}

// Cells per axis: refined until about four points share a cell, so clouds
// concentrated near low-dimensional sets still get small cells.
inline std::size_t grid_resolution(const PointCloud& b) {
    const double dim = static_cast<double>(b.dim() * b.arity());
    auto m = static_cast<std::size_t>(std::clamp(std::floor(std::pow(static_cast<double>(b.size()), 1.0 / dim)), 1.0, 1024.0));
    while (m < 4096 && occupied_cells(b, m) * 4 < b.size()) m *= 2;
    return m;
}

inline double directed_torus(const PointCloud& a, const PointCloud& b) {
    TorusGrid grid(b, grid_resolution(b));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, grid.nearest(a.tuple(i)));
    return worst;
}

} // namespace detail

/// sup over a of the distance to the nearest tuple of b, under the product max metric.
inline double directed_hausdorff(const SystemHandle& sys, const PointCloud& a, const PointCloud& b) {
    detail::check_comparable(a, b);
    if (a.dim() != sys.point_dim()) throw DimensionMismatch("hausdorff: cloud dimension does not match the system");
    if (sys.is_torus()) return detail::directed_torus(a, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size() && best > worst; ++j) best = std::min(best, detail::tuple_dist(sys, a, i, b, j));
        worst = std::max(worst, best);
    }
    return worst;
}

inline double hausdorff_distance(const SystemHandle& sys, const PointCloud& a, const PointCloud& b) {
    return std::max(directed_hausdorff(sys, a, b), directed_hausdorff(sys, b, a));
}

} // namespace nildyn
