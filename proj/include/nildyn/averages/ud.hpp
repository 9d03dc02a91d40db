#pragma once

#include "nildyn/averages/observable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nildyn {

/// Samples phi(t_i) on a strictly increasing grid.
class TimeSeries {
public:
    TimeSeries() = default;

    TimeSeries(std::vector<double> grid, std::vector<Complex> values, bool complex_valued = true)
        : grid_(std::move(grid)), values_(std::move(values)), complex_(complex_valued) {
        if (grid_.size() != values_.size()) throw DimensionMismatch("time series grid and values differ in length");
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (!std::isfinite(grid_[i])) throw std::invalid_argument("time series grid must be finite");
            if (i > 0 && !(grid_[i] > grid_[i - 1]))
                throw std::invalid_argument("time series grid must be strictly increasing");
        }
    }

    static TimeSeries real(std::vector<double> grid, const std::vector<double>& values) {
        return TimeSeries(std::move(grid), std::vector<Complex>(values.begin(), values.end()), false);
    }

    template <typename F>
    static TimeSeries sample(std::vector<double> grid, F&& phi) {
        std::vector<Complex> v;
        v.reserve(grid.size());
        for (double t : grid) v.emplace_back(phi(t));
        return TimeSeries(std::move(grid), std::move(v));
    }

    std::size_t size() const noexcept { return grid_.size(); }
    bool empty() const noexcept { return grid_.empty(); }
    bool is_complex() const noexcept { return complex_; }
    const std::vector<double>& grid() const noexcept { return grid_; }
    const std::vector<Complex>& values() const noexcept { return values_; }

private:
    std::vector<double> grid_;
    std::vector<Complex> values_;
    bool complex_ = false;
};

/// n equally spaced points from a to b inclusive.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) throw std::invalid_argument("linspace needs n >= 2");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

struct Window {
    double sigma;
    double rho;
};

struct UdResult {
    double sup = 0.0;
    std::vector<Window> windows;
    std::vector<double> averages;
};

namespace detail {

/// Trapezoid integral of |phi| from the first grid point, at any time in
/// the grid span, interpolating |phi| linearly between samples.
class AbsIntegral {
public:
    explicit AbsIntegral(const TimeSeries& s) : grid_(s.grid()) {
        abs_.reserve(s.size());
        for (const auto& v : s.values()) abs_.push_back(std::abs(v));
        cum_.assign(s.size(), 0.0L);
        for (std::size_t i = 1; i < s.size(); ++i)
            cum_[i] = cum_[i - 1] + 0.5L * (abs_[i] + abs_[i - 1]) * (static_cast<long double>(grid_[i]) - grid_[i - 1]);
    }

    long double operator()(double t) const {
        auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
        std::size_t i = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
        if (i + 1 >= grid_.size()) return cum_.back();
        long double h = static_cast<long double>(grid_[i + 1]) - grid_[i];
        long double u = (static_cast<long double>(t) - grid_[i]) / h;
        long double at_t = abs_[i] + u * (abs_[i + 1] - abs_[i]);
        return cum_[i] + 0.5L * (abs_[i] + at_t) * (static_cast<long double>(t) - grid_[i]);
    }

private:
    const std::vector<double>& grid_;
    std::vector<double> abs_;
    std::vector<long double> cum_;
};

} // namespace detail

/// Windows [sigma, sigma + rho] for sigma = from, from + step, ... while the
/// window fits below `to`.
inline std::vector<Window> sliding_windows(double from, double to, double rho, double step) {
    if (!(rho > 0) || !(step > 0)) throw std::invalid_argument("sliding_windows: rho and step must be positive");
    std::vector<Window> out;
    for (std::size_t i = 0;; ++i) {
        double sigma = from + step * static_cast<double>(i);
        if (sigma + rho > to * (1 + 1e-15) + 1e-12) break;
        out.push_back({sigma, rho});
    }
    if (out.empty()) throw std::invalid_argument("sliding_windows: empty window range");
    return out;
}

/// max over windows of (1/rho) int_sigma^{sigma+rho} |phi|, trapezoid rule.
inline UdResult ud_sup(const TimeSeries& series, const std::vector<Window>& windows) {
    if (series.size() < 2) throw std::invalid_argument("ud_sup needs at least two samples");
    if (windows.empty()) throw std::invalid_argument("ud_sup needs at least one window");
    const double lo = series.grid().front(), hi = series.grid().back();
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    detail::AbsIntegral integral(series);
    UdResult out;
    out.windows = windows;
    for (const auto& w : windows) {
        if (!(w.rho > 0)) throw std::invalid_argument("ud_sup: window length must be positive");
        if (w.sigma < lo - slack || w.sigma + w.rho > hi + slack)
            throw std::out_of_range("ud_sup: window exceeds the grid span");
        double a = std::max(w.sigma, lo), b = std::min(w.sigma + w.rho, hi);
        double avg = static_cast<double>((integral(b) - integral(a)) / w.rho);
        out.averages.push_back(avg);
        out.sup = std::max(out.sup, avg);
    }
    return out;
}

struct DensityEstimate {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t windows = 0;
};

/// Lower and upper Banach density estimates of a set of hit times in [0,H]:
/// each hit is thickened to [h - w, h + w], and windows of length rho slide
/// across [0,H] at `step`. With integer hits, w = 1/2 counts hits.
inline DensityEstimate banach_density(std::vector<double> hits, double horizon, double rho, double step,
                                      double half_width = 0.05) {
    if (!(rho > 0) || !(step > 0) || !(half_width > 0))
        throw std::invalid_argument("banach_density: rho, step and half-width must be positive");
    if (rho > horizon) throw std::invalid_argument("banach_density: empty window range (rho > H)");
    for (double h : hits)
        if (!(h >= 0 && h <= horizon)) throw std::invalid_argument("banach_density: hit time outside [0,H]");
    std::sort(hits.begin(), hits.end());

    std::vector<std::pair<double, double>> merged;
    for (double h : hits) {
        double a = std::max(0.0, h - half_width), b = std::min(horizon, h + half_width);
        if (!merged.empty() && a <= merged.back().second)
            merged.back().second = std::max(merged.back().second, b);
        else
            merged.emplace_back(a, b);
    }
    std::vector<double> before(merged.size() + 1, 0.0);
    for (std::size_t i = 0; i < merged.size(); ++i) before[i + 1] = before[i] + (merged[i].second - merged[i].first);
    auto covered = [&](double s) {
        auto it = std::upper_bound(merged.begin(), merged.end(), s,
                                   [](double v, const auto& iv) { return v < iv.first; });
        std::size_t i = static_cast<std::size_t>(it - merged.begin());
        if (i == 0) return 0.0;
        return before[i - 1] + std::min(s, merged[i - 1].second) - merged[i - 1].first;
    };

    DensityEstimate out;
    out.lower = 1.0;
    for (const auto& w : sliding_windows(0.0, horizon, rho, step)) {
        double m = (covered(w.sigma + w.rho) - covered(w.sigma)) / rho;
        out.lower = std::min(out.lower, m);
        out.upper = std::max(out.upper, m);
        ++out.windows;
    }
    return out;
}

} // namespace nildyn
