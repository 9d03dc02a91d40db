#pragma once

#include "nildyn/algebra/rational_matrix.hpp"
#include "nildyn/algebra/symbolic_real.hpp"

#include <set>
#include <span>
#include <string>
#include <vector>

namespace nildyn {

struct IndependenceResult {
    bool independent = true;
    /// Nonzero primitive integer vector q with sum q_i * vals_i = 0 when dependent.
    RationalVector relation;
};

/// Sum of q_i * vals_i, computed exactly.
inline SymbolicReal linear_combination(std::span<const SymbolicReal> vals, const RationalVector& q) {
    if (vals.size() != q.size()) throw DimensionMismatch("linear_combination: length mismatch");
    SymbolicReal acc;
    for (std::size_t i = 0; i < vals.size(); ++i) acc += vals[i] * q[i];
    return acc;
}

/// Decides Q-linear independence of `vals` by an exact kernel computation on
/// their coefficient matrix (rows = basis symbols, columns = values).
inline IndependenceResult rationally_independent(std::span<const SymbolicReal> vals) {
    if (vals.empty()) throw std::invalid_argument("rationally_independent: empty input");
    std::set<std::string> symbols;
    for (const auto& v : vals)
        for (const auto& [s, c] : v.coeffs()) symbols.insert(s);

    IndependenceResult out;
    if (symbols.empty()) {
        // every value is zero; the first unit vector is a relation
        out.independent = false;
        out.relation.assign(vals.size(), Rational(0));
        out.relation[0] = 1;
        return out;
    }

    RationalMatrix m(symbols.size(), vals.size());
    std::size_t row = 0;
    for (const auto& s : symbols) {
        for (std::size_t c = 0; c < vals.size(); ++c) m(row, c) = vals[c].coeff(s);
        ++row;
    }
    auto kernel = rational_kernel(m);
    if (kernel.empty()) return out;
    out.independent = false;
    out.relation = std::move(kernel.front());
    if (!linear_combination(vals, out.relation).is_zero())
        throw InvariantBreach("rationally_independent: relation certificate does not vanish");
    return out;
}

/// As above, additionally requiring every symbol to be declared in `basis`.
inline IndependenceResult rationally_independent(std::span<const SymbolicReal> vals, const Basis& basis) {
    for (const auto& v : vals) basis.check_declared(v);
    return rationally_independent(vals);
}

inline IndependenceResult rationally_independent(std::initializer_list<SymbolicReal> vals) {
    return rationally_independent(std::span<const SymbolicReal>(vals.begin(), vals.size()));
}

} // namespace nildyn
