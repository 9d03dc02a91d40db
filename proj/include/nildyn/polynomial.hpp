#pragma once

#include "nildyn/algebra/independence.hpp"

#include <optional>
#include <set>
#include <vector>

namespace nildyn {

/// Real polynomial p(t) = sum c_k t^k, ascending coefficients. Exact
/// coefficients are kept when known so independence can be decided exactly.
class RealPolynomial {
public:
    static RealPolynomial from_exact(std::vector<SymbolicReal> coeffs, const Basis& basis) {
        RealPolynomial p;
        for (const auto& c : coeffs) p.values_.push_back(basis.to_high_precision(c).convert_to<long double>());
        p.exact_ = std::move(coeffs);
        p.trim();
        return p;
    }

    static RealPolynomial from_values(std::vector<double> coeffs) {
        RealPolynomial p;
        for (double c : coeffs) p.values_.push_back(c);
        p.trim();
        return p;
    }

    /// t^k.
    static RealPolynomial monomial(unsigned k, const Rational& c = 1) {
        std::vector<SymbolicReal> coeffs(k + 1);
        coeffs[k] = SymbolicReal(c);
        return from_exact(std::move(coeffs), Basis{});
    }

    long double operator()(long double t) const {
        long double acc = 0;
        for (auto it = values_.rbegin(); it != values_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    std::size_t degree() const noexcept { return values_.empty() ? 0 : values_.size() - 1; }
    bool is_constant() const noexcept { return values_.size() <= 1; }
    const std::vector<long double>& values() const noexcept { return values_; }
    const std::optional<std::vector<SymbolicReal>>& exact() const noexcept { return exact_; }

private:
    void trim() {
        while (!values_.empty() && values_.back() == 0 && (!exact_ || exact_->back().is_zero())) {
            values_.pop_back();
            if (exact_) exact_->pop_back();
        }
    }

    std::vector<long double> values_;
    std::optional<std::vector<SymbolicReal>> exact_;
};

/// Decides whether no nontrivial rational combination of the polynomials is
/// constant. The relation, when one exists, is a certificate: sum q_i p_i has
/// only a constant term.
inline IndependenceResult polynomials_independent(const std::vector<RealPolynomial>& polys) {
    if (polys.empty()) throw std::invalid_argument("polynomial family must be nonempty");
    std::size_t max_deg = 0;
    std::set<std::string> symbols;
    for (const auto& p : polys) {
        if (!p.exact()) throw std::invalid_argument("independence check needs exact polynomial coefficients");
        max_deg = std::max(max_deg, p.degree());
        for (const auto& c : *p.exact())
            for (const auto& s : c.symbols()) symbols.insert(s);
    }
    std::vector<std::pair<std::size_t, std::string>> rows;
    for (std::size_t k = 1; k <= max_deg; ++k)
        for (const auto& s : symbols) rows.emplace_back(k, s);
    if (rows.empty()) {
        RationalVector rel(polys.size(), 0);
        rel[0] = 1;
        return {false, rel};
    }
    RationalMatrix m(rows.size(), polys.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < polys.size(); ++c) {
            const auto& coeffs = *polys[c].exact();
            if (rows[r].first < coeffs.size()) m(r, c) = coeffs[rows[r].first].coeff(rows[r].second);
        }
    auto kernel = rational_kernel(m);
    if (kernel.empty()) return {true, {}};
    return {false, kernel.front()};
}

} // namespace nildyn
