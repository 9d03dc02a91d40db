#pragma once

#include "nildyn/averages/haar.hpp"
#include "nildyn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace nildyn {

struct PottsOptions {
    std::optional<double> step;     // default min(1e-3 sqrt(R), 0.01)
    std::uint64_t x_samples = 8;
    std::uint64_t seed = 0;
};

struct PottsResult {
    double deviation = 0.0;         // L2 norm over x of A_R(x) - prod int f_j
    Complex mean_deviation{};       // mean over x of the same difference
    Complex product_of_integrals{};
    double step = 0.0;
    std::uint64_t time_points = 0;
    std::uint64_t x_samples = 0;
};

inline double potts_default_step(double R) { return std::min(1e-3 * std::sqrt(R), 0.01); }

namespace detail {

/// f(x + s omega) for a trig observable on a torus without allocating.
inline Complex trig_at(const Observable& f, const Point& x, const std::vector<double>& omega, long double s) {
    Complex acc{};
    for (const auto& [m, c] : f.terms()) {
        long double phase = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            phase += static_cast<long double>(m[i]) * (x[i] + s * static_cast<long double>(omega[i]));
        acc += c * unit_phase(phase);
    }
    return acc;
}

} // namespace detail

/// (1/R) int_0^R prod_j f_j(T^{p_j(t)} x) dt - prod_j int f_j dmu, over
/// Haar-random x. The time integral uses one uniform jittered node per cell of
/// width h, which avoids aliasing the rapidly rotating phases at a fixed step.
inline PottsResult potts_average(const SystemHandle& sys, const std::vector<RealPolynomial>& polys,
                                 const std::vector<Observable>& fs, double R, const PottsOptions& opt = {}) {
    if (!sys.is_flow()) throw std::invalid_argument("potts_average expects a flow");
    if (polys.empty() || polys.size() != fs.size())
        throw DimensionMismatch("potts_average needs one observable per polynomial");
    if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("potts_average: R must be positive");
    if (opt.x_samples == 0) throw std::invalid_argument("potts_average: x_samples must be positive");
    for (const auto& f : fs) {
        if (!f.is_trig()) throw std::invalid_argument("potts_average expects trigonometric observables");
        require_compatible(sys, f);
    }
    auto indep = polynomials_independent(polys);
    if (!indep.independent) {
        std::string rel;
        for (const auto& q : indep.relation) rel += (rel.empty() ? "" : ", ") + q.str();
        throw IndependenceViolation("polynomials are not independent: rational relation (" + rel +
                                    ") is constant");
    }

    PottsResult out;
    out.step = opt.step.value_or(potts_default_step(R));
    if (!(out.step > 0)) throw std::invalid_argument("potts_average: step must be positive");
    out.time_points = static_cast<std::uint64_t>(std::ceil(R / out.step));
    out.x_samples = opt.x_samples;
    const long double h = static_cast<long double>(R) / static_cast<long double>(out.time_points);

    out.product_of_integrals = 1.0;
    for (const auto& f : fs) out.product_of_integrals *= f.constant_term();

    Rng xrng(derive_seed(opt.seed, 21));
    double sq = 0.0;
    for (std::uint64_t s = 0; s < opt.x_samples; ++s) {
        Point x = haar_sample(sys, xrng);
        Rng trng(derive_seed(opt.seed, 1000 + s));
        Complex sum{};
        for (std::uint64_t n = 0; n < out.time_points; ++n) {
            long double t = (static_cast<long double>(n) + trng.uniform()) * h;
            Complex v = 1.0;
            for (std::size_t j = 0; j < polys.size(); ++j) {
                long double p = polys[j](t);
                if (sys.is_torus())
                    v *= detail::trig_at(fs[j], x, sys.torus().rates, p);
                else
                    v *= fs[j](sys.evolve(x, static_cast<double>(p)));
            }
            sum += v;
        }
        Complex dev = sum / static_cast<double>(out.time_points) - out.product_of_integrals;
        out.mean_deviation += dev / static_cast<double>(opt.x_samples);
        sq += std::norm(dev);
    }
    out.deviation = std::sqrt(sq / static_cast<double>(opt.x_samples));
    return out;
}

} // namespace nildyn
