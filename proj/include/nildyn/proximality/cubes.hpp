#pragma once

#include "nildyn/cloud.hpp"
#include "nildyn/proximality/witness.hpp"
#include "nildyn/random.hpp"
#include "nildyn/systems/system.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nildyn {

struct SamplingOptions {
    double horizon = 1e4; // flows draw t in [0, horizon]; maps draw integers in [0, horizon]
};

namespace detail {

inline double sample_time(const SystemHandle& sys, Rng& rng, double horizon) {
    if (sys.is_flow()) return rng.uniform(0.0, horizon);
    return static_cast<double>(rng.uniform_int(0, static_cast<std::int64_t>(horizon)));
}

} // namespace detail

/// Sample of the face-group orbit of the diagonal (x, ..., x) in X^(2^d).
/// Tuple entry eps (bit i-1 = eps_i) is g^(eps) x; the first sample uses g = 0.
inline PointCloud cube_orbit_sample(const SystemHandle& sys, const Point& x, int d, std::uint64_t budget,
                                    std::uint64_t seed, const SamplingOptions& opt = {}) {
    if (d < 1 || d > 16) throw std::invalid_argument("cube_orbit_sample: d must be in 1..16");
    const std::size_t arity = std::size_t{1} << d;
    PointCloud cloud(sys.point_dim(), arity, {std::string(sys.tag()), "cube", budget, seed});
    cloud.reserve(budget);
    Rng rng(derive_seed(seed, 1));
    Point base = sys.canonical(x);
    std::vector<double> g(static_cast<std::size_t>(d), 0.0);
    std::vector<Point> tuple(arity);
    for (std::uint64_t n = 0; n < budget; ++n) {
        if (n > 0)
            for (auto& gi : g) gi = detail::sample_time(sys, rng, opt.horizon);
        for (std::size_t mask = 0; mask < arity; ++mask) tuple[mask] = mask == 0 ? base : sys.evolve(base, face_time(g, mask));
        cloud.add(tuple);
    }
    return cloud;
}

/// Sample of N_d: tuples (T^{a_1 t} x', ..., T^{a_d t} x') with x' = T^s x.
/// Maps default to a = (1, ..., d) and need integer a_j; the first sample has s = t = 0.
inline PointCloud nd_sample(const SystemHandle& sys, const Point& x, int d, std::uint64_t budget, std::uint64_t seed,
                            std::vector<double> alphas = {}, const SamplingOptions& opt = {}) {
    if (d < 1) throw std::invalid_argument("nd_sample: d must be >= 1");
    if (alphas.empty())
        for (int j = 1; j <= d; ++j) alphas.push_back(j);
    if (alphas.size() != static_cast<std::size_t>(d))
        throw DimensionMismatch("nd_sample: expected " + std::to_string(d) + " alphas");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (alphas[i] == 0 || !std::isfinite(alphas[i])) throw std::invalid_argument("nd_sample: alphas must be nonzero");
        if (!sys.is_flow() && std::floor(alphas[i]) != alphas[i])
            throw std::invalid_argument("nd_sample: a discrete system needs integer alphas");
        for (std::size_t j = 0; j < i; ++j)
            if (alphas[i] == alphas[j]) throw std::invalid_argument("nd_sample: alphas must be distinct");
    }
    PointCloud cloud(sys.point_dim(), alphas.size(), {std::string(sys.tag()), "nd", budget, seed});
    cloud.reserve(budget);
    Rng rng(derive_seed(seed, 2));
    Point base = sys.canonical(x);
    std::vector<Point> tuple(alphas.size());
    for (std::uint64_t n = 0; n < budget; ++n) {
        double s = n == 0 ? 0.0 : detail::sample_time(sys, rng, opt.horizon);
        double t = n == 0 ? 0.0 : detail::sample_time(sys, rng, opt.horizon);
        Point xp = sys.evolve(base, s);
        for (std::size_t j = 0; j < alphas.size(); ++j) tuple[j] = sys.evolve(xp, alphas[j] * t);
        cloud.add(tuple);
    }
    return cloud;
}

} // namespace nildyn
