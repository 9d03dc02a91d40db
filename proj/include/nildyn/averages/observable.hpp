#pragma once

#include "nildyn/systems/system.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nildyn {

using Complex = std::complex<double>;
using Frequency = std::vector<std::int64_t>;

/// e(v) = exp(2 pi i v), with v reduced mod 1 first.
inline Complex unit_phase(long double v) {
    double r = static_cast<double>(v - std::floor(v));
    return {std::cos(2 * std::numbers::pi * r), std::sin(2 * std::numbers::pi * r)};
}

enum class ObservableKind { TrigMonomial, TrigPolynomial, RawCallback };

/// A bounded function on a torus (or pulled back from one). Trigonometric
/// kinds are finite sums c_m e(m.x); callbacks carry a declared sup bound.
class Observable {
public:
    using Callback = std::function<Complex(const Point&)>;

    static Observable constant(std::size_t dim, Complex c) { return trig_monomial(Frequency(dim, 0), c); }

    static Observable trig_monomial(Frequency freq, Complex coeff = 1.0) {
        if (freq.empty()) throw std::invalid_argument("observable frequencies need dimension >= 1");
        Observable f(ObservableKind::TrigMonomial, freq.size());
        if (coeff != Complex{}) f.terms_.emplace(std::move(freq), coeff);
        return f;
    }

    static Observable trig_polynomial(const std::vector<std::pair<Frequency, Complex>>& terms) {
        if (terms.empty()) throw std::invalid_argument("trig polynomial needs at least one term");
        Observable f(ObservableKind::TrigPolynomial, terms.front().first.size());
        for (const auto& [m, c] : terms) {
            if (m.size() != f.dim_) throw DimensionMismatch("trig polynomial terms have different dimensions");
            f.terms_[m] += c;
        }
        std::erase_if(f.terms_, [](const auto& t) { return t.second == Complex{}; });
        return f;
    }

    /// cos(2 pi m.x).
    static Observable cosine(const Frequency& m) {
        Frequency neg(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) neg[i] = -m[i];
        return trig_polynomial({{m, 0.5}, {neg, 0.5}});
    }

    static Observable callback(std::size_t dim, Callback fn, std::optional<double> sup_bound) {
        if (dim == 0) throw std::invalid_argument("observable needs dimension >= 1");
        Observable f(ObservableKind::RawCallback, dim);
        f.fn_ = std::move(fn);
        f.bound_ = sup_bound;
        return f;
    }

    ObservableKind kind() const noexcept { return kind_; }
    bool is_trig() const noexcept { return kind_ != ObservableKind::RawCallback; }
    std::size_t dim() const noexcept { return dim_; }
    const std::map<Frequency, Complex>& terms() const noexcept { return terms_; }

    /// Sum of |c_m| for trig kinds; the declared bound for callbacks.
    std::optional<double> sup_bound() const {
        if (!is_trig()) return bound_;
        double s = 0;
        for (const auto& t : terms_) s += std::abs(t.second);
        return s;
    }

    /// Haar integral of a trig observable: its constant coefficient.
    Complex constant_term() const {
        if (!is_trig()) throw std::invalid_argument("constant_term needs a trigonometric observable");
        auto it = terms_.find(Frequency(dim_, 0));
        return it == terms_.end() ? Complex{} : it->second;
    }

    std::int64_t max_abs_frequency() const {
        std::int64_t m = 0;
        for (const auto& t : terms_)
            for (auto v : t.first) m = std::max(m, v < 0 ? -v : v);
        return m;
    }

    /// Evaluates on the first dim() coordinates of p.
    Complex operator()(const Point& p) const {
        if (p.size() < dim_) throw DimensionMismatch("observable evaluated on a point of lower dimension");
        if (!is_trig()) {
            Complex v = fn_(p);
            if (bound_ && std::abs(v) > *bound_ * (1 + 1e-12))
                throw std::domain_error("observable value exceeds its declared sup bound");
            return v;
        }
        Complex acc{};
        for (const auto& [m, c] : terms_) {
            long double phase = 0;
            for (std::size_t i = 0; i < dim_; ++i) phase += static_cast<long double>(m[i]) * p[i];
            acc += c * unit_phase(phase);
        }
        return acc;
    }

private:
    Observable(ObservableKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

    ObservableKind kind_;
    std::size_t dim_;
    std::map<Frequency, Complex> terms_;
    Callback fn_;
    std::optional<double> bound_;
};

/// Checks that f can be evaluated on canonical points of sys. Trig
/// observables on a Heisenberg system are pulled back from the base T^2.
inline void require_compatible(const SystemHandle& sys, const Observable& f) {
    std::size_t want = sys.point_dim();
    if (f.is_trig() && sys.is_heisenberg()) want = 2;
    if (f.dim() != want)
        throw DimensionMismatch("observable has dimension " + std::to_string(f.dim()) + ", system expects " +
                                std::to_string(want));
}

} // namespace nildyn
