#pragma once

#include "nildyn/algebra/symbolic_real.hpp"
#include "nildyn/systems/torus.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace nildyn {

/// Element of the 3-dimensional Heisenberg group in Malcev coordinates,
/// with group law (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y').
template <typename Real>
struct BasicHeisenberg {
    Real x{}, y{}, z{};

    friend bool operator==(const BasicHeisenberg&, const BasicHeisenberg&) = default;
};

using HeisenbergElement = BasicHeisenberg<double>;

/// Integer lattice element of Gamma.
struct LatticeElement {
    std::int64_t m = 0, n = 0, k = 0;
    friend bool operator==(const LatticeElement&, const LatticeElement&) = default;
};

template <typename Real>
inline BasicHeisenberg<Real> heis_multiply(const BasicHeisenberg<Real>& a, const BasicHeisenberg<Real>& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z + a.x * b.y};
}

template <typename Real>
inline BasicHeisenberg<Real> heis_inverse(const BasicHeisenberg<Real>& a) {
    return {-a.x, -a.y, -a.z + a.x * a.y};
}

/// One-parameter subgroup through a: a^t = (t x, t y, t z + t(t-1)/2 x y).
template <typename Real>
inline BasicHeisenberg<Real> heis_power(const BasicHeisenberg<Real>& a, Real t) {
    return {t * a.x, t * a.y, t * a.z + t * (t - 1) / 2 * a.x * a.y};
}

inline HeisenbergElement heis_power(const HeisenbergElement& a, double t) { return heis_power<double>(a, t); }

/// h a h^{-1}.
template <typename Real>
inline BasicHeisenberg<Real> heis_conjugate(const BasicHeisenberg<Real>& h, const BasicHeisenberg<Real>& a) {
    return heis_multiply(heis_multiply(h, a), heis_inverse(h));
}

inline double heis_coordinate_gap(const HeisenbergElement& a, const HeisenbergElement& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

/// Euclidean coordinate gap between h a^t h^{-1} and (h a h^{-1})^t.
inline double heis_conjugate_power_identity(const HeisenbergElement& a, const HeisenbergElement& h, double t) {
    auto lhs = heis_conjugate(h, heis_power(a, t));
    auto rhs = heis_power(heis_conjugate(h, a), t);
    return heis_coordinate_gap(lhs, rhs);
}

inline HeisenbergElement heis_from_lattice(const LatticeElement& g) {
    return {static_cast<double>(g.m), static_cast<double>(g.n), static_cast<double>(g.k)};
}

struct HeisenbergReduction {
    HeisenbergElement canonical;
    LatticeElement gamma;
};

// Rounding can push a reduced coordinate onto 1.0 (or just below 0).
template <typename Real>
inline double clamp_unit(Real v) {
    double d = static_cast<double>(v);
    if (d >= 1.0) return std::nextafter(1.0, 0.0);
    return d < 0.0 ? 0.0 : d;
}

/// Right-reduces g modulo Gamma: canonical = g * gamma in [0,1)^3 with
/// m = -floor(x), n = -floor(y), then k fixing the central coordinate.
template <typename Real>
inline HeisenbergReduction heis_reduce(const BasicHeisenberg<Real>& g) {
    HeisenbergReduction r;
    Real fm = -std::floor(g.x);
    Real fn = -std::floor(g.y);
    Real z = g.z + g.x * fn;
    Real fk = -std::floor(z);
    r.gamma = {static_cast<std::int64_t>(fm), static_cast<std::int64_t>(fn), static_cast<std::int64_t>(fk)};
    r.canonical = {clamp_unit(g.x + fm), clamp_unit(g.y + fn), clamp_unit(z + fk)};
    return r;
}

inline bool heis_is_canonical(const HeisenbergElement& p) {
    return p.x >= 0 && p.x < 1 && p.y >= 0 && p.y < 1 && p.z >= 0 && p.z < 1;
}

/// Quotient distance realized on the lattice window {-2..2}^3:
/// min over gamma of |p - q gamma|, symmetrized over the two argument orders.
inline double heis_dist(const HeisenbergElement& p, const HeisenbergElement& q) {
    auto one_way = [](const HeisenbergElement& a, const HeisenbergElement& b) {
        double best = std::numeric_limits<double>::infinity();
        for (int m = -2; m <= 2; ++m) {
            double dx = a.x - (b.x + m);
            for (int n = -2; n <= 2; ++n) {
                double dy = a.y - (b.y + n);
                double base = dx * dx + dy * dy;
                if (base >= best) continue;
                double zb = b.z + b.x * n;
                for (int k = -2; k <= 2; ++k) {
                    double dz = a.z - (zb + k);
                    best = std::min(best, base + dz * dz);
                }
            }
        }
        return std::sqrt(best);
    };
    return std::min(one_way(p, q), one_way(q, p));
}

/// Nilflow T^t(g Gamma) = (a^t g) Gamma with an optional exact shadow (alpha, beta)
/// of the generator's base coordinates.
struct NilflowSpec {
    HeisenbergElement generator;
    std::optional<SymbolicReal> alpha;
    std::optional<SymbolicReal> beta;

    bool has_shadow() const noexcept { return alpha.has_value() && beta.has_value(); }

    static NilflowSpec from_generator(const HeisenbergElement& a) { return NilflowSpec{a, std::nullopt, std::nullopt}; }

    static NilflowSpec from_exact(const SymbolicReal& alpha, const SymbolicReal& beta, double z, const Basis& basis) {
        return NilflowSpec{{basis.to_double(alpha), basis.to_double(beta), z}, alpha, beta};
    }
};

/// heis_reduce(a^t * p), evaluated in extended precision.
inline HeisenbergElement nil_evolve(const NilflowSpec& spec, const HeisenbergElement& p, double t) {
    using LD = long double;
    BasicHeisenberg<LD> a{spec.generator.x, spec.generator.y, spec.generator.z};
    BasicHeisenberg<LD> q{p.x, p.y, p.z};
    return heis_reduce(heis_multiply(heis_power(a, static_cast<LD>(t)), q)).canonical;
}

inline Point to_point(const HeisenbergElement& h) { return {h.x, h.y, h.z}; }
inline HeisenbergElement to_heisenberg(const Point& p) {
    if (p.size() != 3) throw DimensionMismatch("Heisenberg point must have 3 coordinates");
    return {p[0], p[1], p[2]};
}

} // namespace nildyn
