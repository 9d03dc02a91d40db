#pragma once

#include "nildyn/cloud.hpp"
#include "nildyn/systems/system.hpp"

#include <span>

namespace nildyn {

/// Cloud of evolve(x, t) for each t, in the order given.
inline PointCloud orbit_sample(const SystemHandle& sys, const Point& x, std::span<const double> times,
                               std::uint64_t seed = 0) {
    PointCloud cloud(sys.point_dim(), 1, {std::string(sys.tag()), "orbit", times.size(), seed});
    cloud.reserve(times.size());
    for (double t : times) cloud.add(sys.evolve(x, t));
    return cloud;
}

} // namespace nildyn
