#pragma once

#include "nildyn/averages/haar.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace nildyn {

/// Trigonometric polynomial in time: sum_l c_l e(lambda_l t).
struct TrigSpectrum {
    std::vector<std::pair<double, Complex>> terms;

    Complex operator()(double t) const {
        Complex acc{};
        for (const auto& [lambda, c] : terms) acc += c * unit_phase(static_cast<long double>(lambda) * t);
        return acc;
    }
};

/// Checks the time multipliers: nonempty, finite, nonzero and distinct.
inline void require_valid_alphas(const std::vector<double>& alphas) {
    if (alphas.empty()) throw std::invalid_argument("alphas must be nonempty");
    std::set<double> seen;
    for (double a : alphas) {
        if (!std::isfinite(a)) throw std::invalid_argument("alphas must be finite");
        if (a == 0.0) throw std::invalid_argument("alphas must be nonzero");
        if (!seen.insert(a).second) throw std::invalid_argument("alphas must be distinct");
    }
}

namespace detail {

inline void require_integral_times(const SystemHandle& sys, const std::vector<double>& alphas, double t) {
    if (sys.is_flow()) return;
    for (double a : alphas)
        if (std::floor(a * t) != a * t) throw std::invalid_argument("discrete system needs integer times alpha*t");
}

inline Complex multi_product(const SystemHandle& sys, const Observable& f, const std::vector<double>& alphas, double t,
                             const Point& x) {
    Complex v = f(x);
    for (double a : alphas) v *= f(sys.evolve(x, a * t));
    return v;
}

} // namespace detail

/// Closed form of I_f(k, .) on a torus: the Haar integral keeps exactly the
/// frequency tuples (m_0, ..., m_k) summing to zero, each contributing
/// prod c_{m_j} e(t sum_j alpha_j m_j.omega).
inline TrigSpectrum multi_average_spectrum(const SystemHandle& sys, const Observable& f,
                                           const std::vector<double>& alphas) {
    if (!sys.is_torus() || !f.is_trig())
        throw std::invalid_argument("closed-form multiple averages need a trig observable on a torus");
    require_valid_alphas(alphas);
    require_compatible(sys, f);
    const auto& omega = sys.torus().rates;
    std::vector<std::pair<Frequency, Complex>> terms(f.terms().begin(), f.terms().end());
    double tuples = std::pow(static_cast<double>(terms.size()), static_cast<double>(alphas.size() + 1));
    if (tuples > 1e7) throw std::invalid_argument("multi_average_spectrum: too many frequency tuples");

    std::vector<double> rate(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        long double r = 0;
        for (std::size_t c = 0; c < omega.size(); ++c) r += static_cast<long double>(terms[i].first[c]) * omega[c];
        rate[i] = static_cast<double>(r);
    }

    std::vector<std::pair<double, Complex>> raw;
    Frequency sum(f.dim(), 0);
    auto recurse = [&](auto&& self, std::size_t j, Complex coeff, long double lambda) -> void {
        if (j == alphas.size() + 1) {
            if (std::all_of(sum.begin(), sum.end(), [](auto v) { return v == 0; }))
                raw.emplace_back(static_cast<double>(lambda), coeff);
            return;
        }
        long double a = j == 0 ? 0.0L : static_cast<long double>(alphas[j - 1]);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += terms[i].first[c];
            self(self, j + 1, coeff * terms[i].second, lambda + a * rate[i]);
            for (std::size_t c = 0; c < sum.size(); ++c) sum[c] -= terms[i].first[c];
        }
    };
    recurse(recurse, 0, Complex{1.0}, 0.0L);

    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    TrigSpectrum out;
    for (const auto& [lambda, c] : raw) {
        if (!out.terms.empty() && std::fabs(out.terms.back().first - lambda) <= 1e-12 * (1 + std::fabs(lambda)))
            out.terms.back().second += c;
        else
            out.terms.emplace_back(lambda, c);
    }
    std::erase_if(out.terms, [](const auto& t) { return std::abs(t.second) == 0.0; });
    return out;
}

/// I_f(k,t) = int f(x) f(T^{alpha_1 t} x) ... f(T^{alpha_k t} x) dmu by
/// Monte-Carlo over Haar-random x.
inline Estimate multi_average_mc(const SystemHandle& sys, const Observable& f, const std::vector<double>& alphas,
                                 double t, const MonteCarloOptions& opt = {}) {
    require_valid_alphas(alphas);
    require_bounded(f);
    require_compatible(sys, f);
    detail::require_integral_times(sys, alphas, t);
    if (opt.samples == 0) throw std::invalid_argument("multi_average: samples must be positive");
    Rng rng(derive_seed(opt.seed, 12));
    ComplexAccumulator acc;
    for (std::uint64_t i = 0; i < opt.samples; ++i)
        acc.add(detail::multi_product(sys, f, alphas, t, haar_sample(sys, rng)));
    return acc.estimate("monte-carlo");
}

/// I_f(k,t) by the product rule on a uniform grid of n nodes per axis. For a
/// trig observable the rule is exact once n exceeds (k+1) times its largest
/// frequency.
inline Complex multi_average_grid(const SystemHandle& sys, const Observable& f, const std::vector<double>& alphas,
                                  double t, std::size_t nodes) {
    if (!sys.is_torus()) throw std::invalid_argument("grid quadrature needs a torus");
    require_valid_alphas(alphas);
    require_bounded(f);
    require_compatible(sys, f);
    detail::require_integral_times(sys, alphas, t);
    if (nodes == 0) throw std::invalid_argument("grid quadrature needs nodes >= 1");
    const std::size_t dim = sys.point_dim();
    std::vector<std::size_t> idx(dim, 0);
    Point x(dim);
    Complex acc{};
    std::size_t count = 0;
    while (true) {
        for (std::size_t c = 0; c < dim; ++c) x[c] = (static_cast<double>(idx[c]) + 0.5) / static_cast<double>(nodes);
        acc += detail::multi_product(sys, f, alphas, t, x);
        ++count;
        std::size_t c = 0;
        while (c < dim && ++idx[c] == nodes) idx[c++] = 0;
        if (c == dim) break;
    }
    return acc / static_cast<double>(count);
}

/// Smallest node count for which multi_average_grid is exact on f.
inline std::size_t exact_grid_nodes(const Observable& f, std::size_t k) {
    return static_cast<std::size_t>(f.max_abs_frequency()) * (k + 1) + 1;
}

/// I_f(k,t): exact for trig observables on tori, Monte-Carlo otherwise.
inline Estimate multi_average_I(const SystemHandle& sys, const Observable& f, const std::vector<double>& alphas,
                                double t, const MonteCarloOptions& opt = {}) {
    if (sys.is_torus() && f.is_trig()) {
        detail::require_integral_times(sys, alphas, t);
        return {multi_average_spectrum(sys, f, alphas)(t), 0.0, "exact", 0};
    }
    return multi_average_mc(sys, f, alphas, t, opt);
}

} // namespace nildyn
