#pragma once

#include "nildyn/averages/observable.hpp"
#include "nildyn/random.hpp"

#include <cmath>
#include <string>

namespace nildyn {

/// A (possibly exact) value with its Monte-Carlo standard error. For
/// complex values the error is sqrt((var Re + var Im) / n).
struct Estimate {
    Complex value{};
    double stderr_ = 0.0;
    std::string method;
    std::uint64_t samples = 0;

    bool exact() const noexcept { return method == "exact"; }
};

struct MonteCarloOptions {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
};

/// Running mean and variance of complex samples.
class ComplexAccumulator {
public:
    void add(Complex v) {
        ++n_;
        Complex d = v - mean_;
        mean_ += d / static_cast<double>(n_);
        Complex d2 = v - mean_;
        m2_ += d.real() * d2.real() + d.imag() * d2.imag();
    }

    std::uint64_t count() const noexcept { return n_; }
    Complex mean() const noexcept { return mean_; }
    double stderr_of_mean() const {
        if (n_ < 2) return 0.0;
        return std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_));
    }

    Estimate estimate(std::string method) const { return {mean_, stderr_of_mean(), std::move(method), n_}; }

private:
    std::uint64_t n_ = 0;
    Complex mean_{};
    double m2_ = 0.0;
};

/// A Haar-random canonical point. Every system's fundamental domain is
/// [0,1)^D with Lebesgue measure as the invariant measure.
inline Point haar_sample(const SystemHandle& sys, Rng& rng) {
    Point p(sys.point_dim());
    for (auto& v : p) v = rng.uniform();
    return sys.canonical(p);
}

inline void require_bounded(const Observable& f) {
    if (!f.sup_bound()) throw std::invalid_argument("raw observable needs a declared sup bound");
}

/// Monte-Carlo integral of f against Haar measure.
inline Estimate integrate_haar_mc(const SystemHandle& sys, const Observable& f, std::uint64_t n_samples,
                                  std::uint64_t seed) {
    require_bounded(f);
    require_compatible(sys, f);
    if (n_samples == 0) throw std::invalid_argument("integrate_haar: n_samples must be positive");
    Rng rng(derive_seed(seed, 11));
    ComplexAccumulator acc;
    for (std::uint64_t i = 0; i < n_samples; ++i) acc.add(f(haar_sample(sys, rng)));
    return acc.estimate("monte-carlo");
}

/// Exact for trig observables on tori; Monte-Carlo otherwise.
inline Estimate integrate_haar(const SystemHandle& sys, const Observable& f, std::uint64_t n_samples,
                               std::uint64_t seed) {
    require_bounded(f);
    require_compatible(sys, f);
    if (f.is_trig() && sys.is_torus()) return {f.constant_term(), 0.0, "exact", 0};
    return integrate_haar_mc(sys, f, n_samples, seed);
}

} // namespace nildyn
