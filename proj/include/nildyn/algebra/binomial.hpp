#pragma once

#include "nildyn/algebra/symbolic_real.hpp"

#include <variant>

namespace nildyn {

/// Generalized binomial coefficient a(a-1)...(a-n+1)/n!, exact over Q.
inline Rational binom_real(const Rational& a, unsigned n) {
    Rational acc = 1;
    for (unsigned i = 0; i < n; ++i) acc *= (a - Rational(i)) / Rational(i + 1);
    return acc;
}

inline double binom_real(double a, unsigned n) {
    double acc = 1.0;
    for (unsigned i = 0; i < n; ++i) acc *= (a - static_cast<double>(i)) / static_cast<double>(i + 1);
    return acc;
}

/// Exact (Rational) when `a` is rational, otherwise a float evaluation of the
/// rendered value.
inline std::variant<Rational, double> binom_real(const SymbolicReal& a, unsigned n, const Basis& basis) {
    if (auto r = a.as_rational()) return binom_real(*r, n);
    return binom_real(basis.to_double(a), n);
}

} // namespace nildyn
