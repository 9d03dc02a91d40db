#pragma once

#include "nildyn/polynomial.hpp"
#include "nildyn/proximality/cubes.hpp"
#include "nildyn/random.hpp"
#include "nildyn/systems/system.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace nildyn {

struct Coverage {
    double fraction = 0.0;
    std::uint64_t cells_hit = 0;
    std::uint64_t cells_total = 0;
    std::uint64_t samples = 0;
};

/// Counts distinct cells of [0,1)^D at a given resolution.
class CellCounter {
public:
    CellCounter(std::size_t dims, double resolution) : dims_(dims) {
        if (!(resolution > 0) || resolution > 1) throw std::invalid_argument("resolution must be in (0, 1]");
        m_ = static_cast<std::uint64_t>(std::ceil(1.0 / resolution - 1e-9));
        double total = std::pow(static_cast<double>(m_), static_cast<double>(dims));
        if (total > 9.0e15) throw std::invalid_argument("too many coverage cells; coarsen the resolution");
        total_ = static_cast<std::uint64_t>(total);
    }

    void add(std::span<const double> coords) {
        if (coords.size() != dims_) throw DimensionMismatch("CellCounter: coordinate count mismatch");
        std::uint64_t key = 0;
        for (double c : coords) {
            auto cell = static_cast<std::uint64_t>(wrap_unit(c) * static_cast<double>(m_));
            key = key * m_ + std::min(cell, m_ - 1);
        }
        hit_.insert(key);
    }

    Coverage result(std::uint64_t samples) const {
        return {static_cast<double>(hit_.size()) / static_cast<double>(total_), hit_.size(), total_, samples};
    }

private:
    std::size_t dims_;
    std::uint64_t m_ = 1;
    std::uint64_t total_ = 1;
    std::unordered_set<std::uint64_t> hit_;
};

/// Fraction of resolution-cells of X^d hit by (T^{p_1(t)} x, ..., T^{p_d(t)} x)
/// over budget-many t drawn uniformly from [0, horizon] (first sample t = 0).
inline Coverage poly_orbit_density(const SystemHandle& sys, const std::vector<RealPolynomial>& polys, const Point& x,
                                   std::uint64_t budget, double resolution, std::uint64_t seed = 0,
                                   const SamplingOptions& opt = {}) {
    if (polys.empty()) throw std::invalid_argument("poly_orbit_density: empty polynomial list");
    if (!sys.is_flow()) throw std::invalid_argument("poly_orbit_density expects a flow");
    for (const auto& p : polys)
        if (p.is_constant()) throw std::invalid_argument("poly_orbit_density: polynomials must be nonconstant");
    const std::size_t dim = sys.point_dim();
    CellCounter cells(dim * polys.size(), resolution);
    Rng rng(derive_seed(seed, 3));
    Point base = sys.canonical(x);
    std::vector<double> coords(dim * polys.size());
    for (std::uint64_t n = 0; n < budget; ++n) {
        long double t = n == 0 ? 0.0L : static_cast<long double>(rng.uniform(0.0, opt.horizon));
        for (std::size_t j = 0; j < polys.size(); ++j) {
            auto p = sys.evolve(base, static_cast<double>(polys[j](t)));
            std::copy(p.begin(), p.end(), coords.begin() + static_cast<std::ptrdiff_t>(j * dim));
        }
        cells.add(coords);
    }
    return cells.result(budget);
}

enum class FactorProjection { Identity, HeisenbergToBase, TorusFirstCoordinate };

inline std::string_view to_string(FactorProjection p) {
    switch (p) {
    case FactorProjection::Identity: return "identity";
    case FactorProjection::HeisenbergToBase: return "heisenberg-base";
    case FactorProjection::TorusFirstCoordinate: return "torus-first";
    }
    return "unknown";
}

namespace detail {

/// Fiber coordinates of p when p lies within resolution/2 of the fiber over
/// pi(x); nullopt otherwise.
inline std::optional<std::vector<double>> fiber_coords(const SystemHandle& sys, FactorProjection proj, const Point& x,
                                                       const Point& p, double half) {
    switch (proj) {
    case FactorProjection::Identity:
        if (sys.dist(p, x) < half) return std::vector<double>{};
        return std::nullopt;
    case FactorProjection::TorusFirstCoordinate:
        if (circle_dist(p[0], x[0]) >= half) return std::nullopt;
        return std::vector<double>(p.begin() + 1, p.end());
    case FactorProjection::HeisenbergToBase: {
        if (circle_dist(p[0], x[0]) >= half || circle_dist(p[1], x[1]) >= half) return std::nullopt;
        // Representative p*(m,n,0) whose base coordinates sit next to pi(x).
        double n = std::round(x[1] - p[1]);
        return std::vector<double>{wrap_unit(p[2] + p[0] * n)};
    }
    }
    return std::nullopt;
}

} // namespace detail

/// Fraction of resolution-cells of (pi^{-1}(pi x))^d entered by the
/// diagonal-orbit cloud (T^{a_1 t} x, ..., T^{a_d t} x).
inline Coverage fiber_coverage(const SystemHandle& sys, FactorProjection proj, int d, const std::vector<double>& alphas,
                               const Point& x, std::uint64_t budget, double resolution, std::uint64_t seed = 0,
                               const SamplingOptions& opt = {}) {
    if (d < 1 || alphas.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("fiber_coverage: need d >= 1 and d alphas");
    std::size_t fiber_dim = 0;
    switch (proj) {
    case FactorProjection::Identity: fiber_dim = 0; break;
    case FactorProjection::HeisenbergToBase:
        if (!sys.is_heisenberg()) throw std::invalid_argument("fiber_coverage: heisenberg-base needs a Heisenberg system");
        fiber_dim = 1;
        break;
    case FactorProjection::TorusFirstCoordinate:
        if (!sys.is_torus() || sys.point_dim() < 2)
            throw std::invalid_argument("fiber_coverage: torus-first needs a torus of dimension >= 2");
        fiber_dim = sys.point_dim() - 1;
        break;
    }
    for (double a : alphas)
        if (!sys.is_flow() && std::floor(a) != a) throw std::invalid_argument("fiber_coverage: maps need integer alphas");
    Point base = sys.canonical(x);
    Rng rng(derive_seed(seed, 4));
    const std::size_t cell_dims = fiber_dim * static_cast<std::size_t>(d);
    if (cell_dims == 0) {
        // The fiber is the single point x: one cell, entered at t = 0.
        std::uint64_t hit = 0;
        for (std::uint64_t n = 0; n < budget && !hit; ++n) {
            double t = n == 0 ? 0.0 : detail::sample_time(sys, rng, opt.horizon);
            bool all = true;
            for (double a : alphas) all = all && detail::fiber_coords(sys, proj, base, sys.evolve(base, a * t), resolution / 2).has_value();
            hit = all ? 1 : 0;
        }
        return {static_cast<double>(hit), hit, 1, budget};
    }
    CellCounter cells(cell_dims, resolution);
    std::vector<double> coords;
    for (std::uint64_t n = 0; n < budget; ++n) {
        double t = n == 0 ? 0.0 : detail::sample_time(sys, rng, opt.horizon);
        coords.clear();
        bool inside = true;
        for (std::size_t j = 0; j < alphas.size() && inside; ++j) {
            auto f = detail::fiber_coords(sys, proj, base, sys.evolve(base, alphas[j] * t), resolution / 2);
            if (!f) inside = false;
            else coords.insert(coords.end(), f->begin(), f->end());
        }
        if (inside) cells.add(coords);
    }
    return cells.result(budget);
}

} // namespace nildyn
