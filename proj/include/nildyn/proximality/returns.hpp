#pragma once

#include "nildyn/systems/system.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nildyn {

/// Grid times t with dist(T^t x, center) < radius.
inline std::vector<double> return_set(const SystemHandle& sys, const Point& x, const Point& center, double radius,
                                      std::span<const double> time_grid) {
    if (!(radius > 0)) throw std::invalid_argument("return_set: radius must be positive");
    std::vector<double> out;
    for (double t : time_grid)
        if (sys.dist(sys.evolve(x, t), center) < radius) out.push_back(t);
    return out;
}

/// Uniform grid 0, step, 2 step, ... up to horizon.
inline std::vector<double> time_grid(double horizon, double step) {
    if (!(step > 0) || !(horizon >= 0)) throw std::invalid_argument("time_grid: need step > 0 and horizon >= 0");
    std::vector<double> g;
    auto n = static_cast<std::uint64_t>(std::floor(horizon / step + 1e-9));
    g.reserve(n + 1);
    for (std::uint64_t k = 0; k <= n; ++k) g.push_back(static_cast<double>(k) * step);
    return g;
}

struct ReturnProbe {
    bool nonempty = false;
    std::optional<double> first_time;
    std::uint64_t scanned = 0;
    std::uint64_t hits_x = 0;   // grid times in R(x, B(y, radius))
    std::uint64_t hits_nil = 0; // grid times in R(y0, B(y0, radius0))
};

/// Probes R(x, B(y, radius)) and the nilflow return set R(y0, B(y0, radius0))
/// for a common grid time in [0, horizon].
inline ReturnProbe rp_return_intersection(const SystemHandle& sys, const Point& x, const Point& y, int d,
                                          double radius, const SystemHandle& nil, const Point& y0, double radius0,
                                          double horizon, double grid_step) {
    if (d < 1) throw std::invalid_argument("rp_return_intersection: d must be >= 1");
    if (!nil.is_heisenberg() && !nil.is_torus())
        throw std::invalid_argument("rp_return_intersection: second system must be a nilsystem of step <= 2");
    if (!(radius > 0) || !(radius0 > 0)) throw std::invalid_argument("rp_return_intersection: radii must be positive");
    ReturnProbe probe;
    for (double t : time_grid(horizon, grid_step)) {
        ++probe.scanned;
        bool in_x = sys.dist(sys.evolve(x, t), y) < radius;
        bool in_nil = nil.dist(nil.evolve(y0, t), y0) < radius0;
        probe.hits_x += in_x;
        probe.hits_nil += in_nil;
        if (in_x && in_nil && !probe.nonempty) {
            probe.nonempty = true;
            probe.first_time = t;
        }
    }
    return probe;
}

} // namespace nildyn
