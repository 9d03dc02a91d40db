#pragma once

#include "nildyn/algebra/independence.hpp"
#include "nildyn/systems/system.hpp"

#include <algorithm>
#include <vector>

namespace nildyn {

namespace detail {

// Exact frequencies of the rotation part: torus frequencies, or (alpha, beta)
// of a nilflow (minimality of a Heisenberg nilflow reduces to its T^2 factor).
inline std::vector<SymbolicReal> exact_frequencies(const SystemHandle& sys) {
    if (sys.is_torus()) {
        if (!sys.torus().exact) throw std::invalid_argument("minimality test needs exact torus frequencies");
        return *sys.torus().exact;
    }
    if (sys.is_heisenberg()) {
        if (!sys.nil().has_shadow()) throw std::invalid_argument("minimality test needs the exact (alpha, beta) shadow");
        return {*sys.nil().alpha, *sys.nil().beta};
    }
    throw std::invalid_argument("minimality test not supported for " + std::string(sys.tag()));
}

} // namespace detail

/// Minimality of the flow: the frequencies are rationally independent.
inline bool flow_minimal(const SystemHandle& sys) {
    if (!sys.is_flow() || sys.kind() == SystemKind::Suspension)
        throw std::invalid_argument("flow_minimal expects a torus flow or Heisenberg nilflow");
    auto freqs = detail::exact_frequencies(sys);
    return rationally_independent(freqs).independent;
}

/// Minimality of a discrete rotation/nilsystem: 1, x_1, ..., x_n independent.
inline bool map_minimal(const SystemHandle& sys) {
    if (sys.is_flow()) throw std::invalid_argument("map_minimal expects a torus map or Heisenberg nilsystem");
    auto freqs = detail::exact_frequencies(sys);
    freqs.insert(freqs.begin(), SymbolicReal(1));
    return rationally_independent(freqs).independent;
}

/// The values 1, x_1 t, ..., x_n t whose independence decides minimality of T^t.
/// Throws UnsupportedBasis when some x_i t leaves the declared basis.
inline std::vector<SymbolicReal> time_t_frequencies(const SystemHandle& sys, const SymbolicReal& t, const Basis& basis) {
    if (t.is_zero()) throw std::invalid_argument("time_t_minimal: t must be nonzero");
    auto freqs = detail::exact_frequencies(sys);
    std::vector<std::string> missing;
    for (const auto& f : freqs) {
        auto m = basis.missing_products(f, t);
        missing.insert(missing.end(), m.begin(), m.end());
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        throw UnsupportedBasis(std::move(missing));
    }
    std::vector<SymbolicReal> vals{SymbolicReal(1)};
    for (const auto& f : freqs) vals.push_back(basis.multiply(f, t));
    return vals;
}

/// Minimality of the time-t map of a flow, decided exactly.
inline bool time_t_minimal(const SystemHandle& sys, const SymbolicReal& t, const Basis& basis) {
    if (!sys.is_flow() || sys.kind() == SystemKind::Suspension)
        throw std::invalid_argument("time_t_minimal expects a torus flow or Heisenberg nilflow");
    auto vals = time_t_frequencies(sys, t, basis);
    return rationally_independent(vals, basis).independent;
}

} // namespace nildyn
