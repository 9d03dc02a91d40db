#pragma once

#include "nildyn/algebra/symbolic_real.hpp"
#include "nildyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace nildyn {

/// Coordinates of a canonical point; the layout depends on the system.
using Point = std::vector<double>;

/// Reduces v into [0,1). Values that round up to 1.0 are clamped just below it.
template <typename Real>
inline double wrap_unit(Real v) {
    Real r = v - std::floor(v);
    double d = static_cast<double>(r);
    if (d >= 1.0) d = std::nextafter(1.0, 0.0);
    if (d < 0.0) d = 0.0;
    return d;
}

/// Distance on R/Z.
inline double circle_dist(double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

/// Max over coordinates of the circle distance.
inline double torus_dist(const Point& p, const Point& q) {
    if (p.size() != q.size()) throw DimensionMismatch("torus_dist: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, circle_dist(p[i], q[i]));
    return m;
}

/// Linear flow t -> p + t*freqs on T^n. `rates` are the float renderings of
/// the exact frequencies; `exact` is absent for float-only experiments.
struct TorusFlowSpec {
    std::vector<double> rates;
    std::optional<std::vector<SymbolicReal>> exact;

    std::size_t dim() const noexcept { return rates.size(); }

    static TorusFlowSpec from_exact(std::vector<SymbolicReal> freqs, const Basis& basis) {
        if (freqs.empty()) throw std::invalid_argument("torus flow needs dimension >= 1");
        TorusFlowSpec s;
        for (const auto& f : freqs) s.rates.push_back(basis.to_double(f));
        s.exact = std::move(freqs);
        return s;
    }

    static TorusFlowSpec from_rates(std::vector<double> rates) {
        if (rates.empty()) throw std::invalid_argument("torus flow needs dimension >= 1");
        return TorusFlowSpec{std::move(rates), std::nullopt};
    }
};

inline Point torus_evolve(const TorusFlowSpec& spec, const Point& p, double t) {
    if (p.size() != spec.dim())
        throw DimensionMismatch("torus_evolve: point has dimension " + std::to_string(p.size()) + ", flow has " +
                                std::to_string(spec.dim()));
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        long double phase = static_cast<long double>(p[i]) +
                            static_cast<long double>(spec.rates[i]) * static_cast<long double>(t);
        out[i] = wrap_unit(phase);
    }
    return out;
}

inline Point torus_canonical(const Point& p) {
    Point out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = wrap_unit(p[i]);
    return out;
}

} // namespace nildyn
